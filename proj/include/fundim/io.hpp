#pragma once

// Network files and report serialization.
//
// Network file: {"widths": [...], "scalar_mode": "rational"|"float",
// "layers": [[row-major entries incl. bias], ...]}. Rational entries are
// "p/q" strings or JSON integers.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "fundim/funcdim.hpp"
#include "fundim/pwl_complex.hpp"

namespace fundim {

using AnyParameter = std::variant<RationalParameter, FloatParameter>;

ScalarMode mode_of(const AnyParameter& p);

// Throws std::invalid_argument with "line L, column C" for syntax errors and
// the JSON path for schema errors. If expected is set, a file in the other
// scalar mode is rejected.
AnyParameter parse_network(const std::string& text,
                           std::optional<ScalarMode> expected = std::nullopt);
AnyParameter load_network(const std::filesystem::path& path,
                          std::optional<ScalarMode> expected = std::nullopt);

nlohmann::json network_to_json(const AnyParameter& p);
void save_network(const AnyParameter& p, const std::filesystem::path& path);

// Scalars: rationals as canonical strings, doubles as numbers.
nlohmann::json scalar_json(const Rational& v);
nlohmann::json scalar_json(double v);

// Parses an input point "3", "5/2" or "1,-2/3" in the given mode.
template <class T>
std::vector<T> parse_point(const std::string& text);

template <class T>
nlohmann::json to_json(const std::vector<T>& v);
template <class T>
nlohmann::json to_json(const Matrix<T>& m);
template <class T>
nlohmann::json to_json(const RankReport<T>& r);
template <class T>
nlohmann::json to_json(const Complex1D<T>& c);
nlohmann::json to_json(const TernaryLabel& label);

// Long-format CSV: one line per entry.
template <class T>
void write_parameter_csv(std::ostream& os, const Parameter<T>& p);  // layer,row,col,value
template <class T>
void write_jacobian_csv(std::ostream& os, const Parameter<T>& p, const Matrix<T>& jac);
// point,output,layer,row,col,value

}  // namespace fundim
