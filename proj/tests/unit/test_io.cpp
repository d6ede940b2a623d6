#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fundim/io.hpp"
#include "helpers.hpp"

namespace fundim {
namespace {

using testing::q;

std::string message_of(const std::string& text, std::optional<ScalarMode> mode = std::nullopt) {
  try {
    parse_network(text, mode);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

TEST(Network, ParsesRationalStrings) {
  const auto p = parse_network(
      R"({"widths":[1,2,1],"scalar_mode":"rational","layers":[["2","-5","-1","4"],["1","1","1"]]})");
  ASSERT_EQ(mode_of(p), ScalarMode::kRational);
  EXPECT_EQ(std::get<RationalParameter>(p), worked::s0());
  const auto half = parse_network(
      R"({"widths":[1,1],"scalar_mode":"rational","layers":[["5/2",3]]})");
  EXPECT_EQ(std::get<RationalParameter>(half).layer(0)(0, 0), q("5/2"));
}

TEST(Network, SaveLoadRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "fundim_io_roundtrip.json";
  const AnyParameter r = testing::net({1, 2, 1}, {"1/3", "-7/11", "2", "0", "5", "-1/64", "9"});
  save_network(r, path);
  EXPECT_EQ(std::get<RationalParameter>(load_network(path)), std::get<RationalParameter>(r));
  const AnyParameter f = to_float(worked::s0());
  save_network(f, path);
  EXPECT_EQ(std::get<FloatParameter>(load_network(path)), std::get<FloatParameter>(f));
  std::filesystem::remove(path);
}

TEST(Network, NoImplicitModeConversion) {
  const std::string floaty = R"({"widths":[1,1],"scalar_mode":"float","layers":[[1.5,2]]})";
  EXPECT_NE(message_of(floaty, ScalarMode::kRational).find("no implicit conversion"),
            std::string::npos);
  const std::string bad = R"({"widths":[1,1],"scalar_mode":"rational","layers":[[1.5,2]]})";
  EXPECT_NE(message_of(bad).find("/layers/0/0"), std::string::npos);
}

TEST(Network, SyntaxErrorsReportLineAndColumn) {
  const auto msg = message_of("{\n  \"widths\": [1,1],\n  oops\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Network, SchemaErrors) {
  EXPECT_NE(message_of(R"({"scalar_mode":"rational","layers":[]})").find("/widths"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"widths":[1,1],"scalar_mode":"rational","layers":[["1"]]})")
                .find("expected 1x2"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"widths":[1,1],"scalar_mode":"exact","layers":[["1","1"]]})")
                .find("scalar_mode"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"widths":[1,0],"scalar_mode":"rational","layers":[[]]})").find("/widths"),
            std::string::npos);
  EXPECT_THROW(load_network("/nonexistent/net.json"), std::invalid_argument);
}

TEST(Points, Parse) {
  EXPECT_EQ(parse_point<Rational>("1,-2/3"), testing::qv({"1", "-2/3"}));
  EXPECT_EQ(parse_point<double>("0.5, -2"), (std::vector<double>{0.5, -2.0}));
  EXPECT_THROW(parse_point<Rational>("1,,2"), std::invalid_argument);
  EXPECT_THROW(parse_point<Rational>("0.5"), std::invalid_argument);
}

TEST(Csv, ParameterLongFormat) {
  std::ostringstream os;
  write_parameter_csv(os, worked::two_neuron());
  EXPECT_EQ(os.str(), "layer,row,col,value\n0,0,0,1\n0,0,1,0\n0,1,0,1\n0,1,1,-1\n");
}

TEST(Json, ReportFields) {
  RankReport<double> r;
  r.value = 3;
  r.tol = 1e-9;
  r.bound = BoundKind::kLowerBound;
  const auto j = to_json(r);
  EXPECT_EQ(j["value"], 3);
  EXPECT_EQ(j["backend"], "numeric");
  EXPECT_EQ(j["bound"], "certified_lower_bound");
  EXPECT_EQ(to_json(std::vector<Rational>{q("-5/2")}), nlohmann::json::array({"-5/2"}));
}

}  // namespace
}  // namespace fundim
