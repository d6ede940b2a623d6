#include "fundim/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace fundim {

using nlohmann::json;

ScalarMode mode_of(const AnyParameter& p) {
  return std::holds_alternative<RationalParameter>(p) ? ScalarMode::kRational
                                                      : ScalarMode::kFloat;
}

namespace {

std::string line_col(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw std::invalid_argument("network schema error at " + where + ": " + what);
}

Rational rational_entry(const json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      schema_error(where, e.what());
    }
  }
  if (v.is_number_integer()) {
    return parse_rational(v.dump());
  }
  if (v.is_number_float()) {
    schema_error(where, "non-integer number " + v.dump() +
                            " in a rational file; write it as a \"p/q\" string");
  }
  schema_error(where, "expected a \"p/q\" string or an integer");
}

double float_entry(const json& v, const std::string& where) {
  if (!v.is_number()) schema_error(where, "expected a number");
  return v.get<double>();
}

}  // namespace

AnyParameter parse_network(const std::string& text, std::optional<ScalarMode> expected) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    throw std::invalid_argument("malformed network JSON at " +
                                line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!doc.is_object()) schema_error("/", "expected an object");
  if (!doc.contains("widths") || !doc["widths"].is_array()) {
    schema_error("/widths", "missing or not an array");
  }
  std::vector<size_t> widths;
  for (size_t i = 0; i < doc["widths"].size(); ++i) {
    const auto& w = doc["widths"][i];
    if (!w.is_number_integer() || w.get<long long>() < 1) {
      schema_error("/widths/" + std::to_string(i), "expected a positive integer");
    }
    widths.push_back(w.get<size_t>());
  }
  std::optional<Architecture> arch;
  try {
    arch.emplace(widths);
  } catch (const std::invalid_argument& e) {
    schema_error("/widths", e.what());
  }
  if (!doc.contains("scalar_mode") || !doc["scalar_mode"].is_string()) {
    schema_error("/scalar_mode", "missing or not a string");
  }
  ScalarMode mode;
  try {
    mode = parse_scalar_mode(doc["scalar_mode"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    schema_error("/scalar_mode", e.what());
  }
  if (expected && *expected != mode) {
    throw std::invalid_argument("network file is in " + std::string(to_string(mode)) +
                                " mode but " + std::string(to_string(*expected)) +
                                " mode was requested; no implicit conversion");
  }
  if (!doc.contains("layers") || !doc["layers"].is_array()) {
    schema_error("/layers", "missing or not an array");
  }
  const auto& layers = doc["layers"];
  if (layers.size() != arch->depth()) {
    schema_error("/layers", "has " + std::to_string(layers.size()) + " layers, widths imply " +
                                std::to_string(arch->depth()));
  }
  auto build = [&]<class T>(auto&& entry) {
    std::vector<Matrix<T>> mats;
    for (size_t l = 0; l < layers.size(); ++l) {
      const std::string where = "/layers/" + std::to_string(l);
      const size_t rows = arch->width(l + 1), cols = arch->width(l) + 1;
      if (!layers[l].is_array()) schema_error(where, "expected an array");
      if (layers[l].size() != rows * cols) {
        schema_error(where, "has " + std::to_string(layers[l].size()) + " entries, expected " +
                                std::to_string(rows) + "x" + std::to_string(cols) + " = " +
                                std::to_string(rows * cols));
      }
      std::vector<T> entries;
      for (size_t k = 0; k < layers[l].size(); ++k) {
        entries.push_back(entry(layers[l][k], where + "/" + std::to_string(k)));
      }
      mats.emplace_back(rows, cols, std::move(entries));
    }
    return Parameter<T>(*arch, std::move(mats));
  };
  if (mode == ScalarMode::kRational) {
    return build.operator()<Rational>(rational_entry);
  }
  return build.operator()<double>(float_entry);
}

AnyParameter load_network(const std::filesystem::path& path, std::optional<ScalarMode> expected) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open network file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_network(buf.str(), expected);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

json scalar_json(const Rational& v) { return to_string(v); }
json scalar_json(double v) { return v; }

json network_to_json(const AnyParameter& any) {
  return std::visit(
      [](const auto& p) {
        using T = typename std::decay_t<decltype(p)>::Scalar;
        json layers = json::array();
        for (const auto& a : p.layers()) {
          json row = json::array();
          for (const auto& v : a.entries()) row.push_back(scalar_json(v));
          layers.push_back(std::move(row));
        }
        return json{{"widths", p.arch().widths()},
                    {"scalar_mode", std::string(to_string(ScalarTraits<T>::kMode))},
                    {"layers", std::move(layers)}};
      },
      any);
}

void save_network(const AnyParameter& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << network_to_json(p).dump(2) << '\n';
}

template <class T>
std::vector<T> parse_point(const std::string& text) {
  std::vector<T> x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    while (!item.empty() && item.front() == ' ') item.erase(0, 1);
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if constexpr (ScalarTraits<T>::kExact) {
      x.push_back(parse_rational(item));
    } else {
      size_t used = 0;
      double v;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || item.empty()) {
        // Allow p/q in float mode too.
        v = parse_rational(item).get_d();
      }
      x.push_back(v);
    }
  }
  if (x.empty()) throw std::invalid_argument("empty input point");
  return x;
}

template <class T>
json to_json(const std::vector<T>& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back(scalar_json(e));
  return out;
}

template <class T>
json to_json(const Matrix<T>& m) {
  json rows = json::array();
  for (size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (const auto& v : m.row(r)) row.push_back(scalar_json(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
json to_json(const RankReport<T>& r) {
  json witness = json::array();
  for (const auto& z : r.witness) witness.push_back(to_json(z));
  json out = {{"value", r.value},
              {"backend", std::string(to_string(r.backend))},
              {"tol", r.tol ? json(*r.tol) : json(nullptr)},
              {"bound", std::string(to_string(r.bound))},
              {"strategy", r.strategy},
              {"witness_batch", std::move(witness)},
              {"notes", r.notes}};
  if (r.saturated) out["saturated"] = *r.saturated;
  return out;
}

json to_json(const TernaryLabel& label) {
  json out = json::array();
  for (const auto& layer : label.layers) {
    json l = json::array();
    for (auto v : layer) l.push_back(static_cast<int>(v));
    out.push_back(std::move(l));
  }
  return out;
}

template <class T>
json to_json(const Complex1D<T>& c) {
  json cells = json::array();
  for (const auto& cell : c.cells) {
    const T z = cell_representative(cell);
    json slopes = json::array(), values = json::array();
    for (const auto& f : cell.output) {
      slopes.push_back(scalar_json(f.slope));
      values.push_back(scalar_json(f.at(z)));
    }
    cells.push_back({{"lo", cell.lo ? scalar_json(*cell.lo) : json(nullptr)},
                     {"hi", cell.hi ? scalar_json(*cell.hi) : json(nullptr)},
                     {"label", to_json(cell.label)},
                     {"representative", scalar_json(z)},
                     {"slopes", std::move(slopes)},
                     {"values", std::move(values)}});
  }
  json vertex_labels = json::array();
  for (const auto& l : c.vertex_labels) vertex_labels.push_back(to_json(l));
  return {{"breakpoints", to_json(c.breakpoints)},
          {"cells", std::move(cells)},
          {"vertex_labels", std::move(vertex_labels)},
          {"warnings", c.warnings}};
}

namespace {

template <class T>
void write_scalar(std::ostream& os, const T& v) {
  if constexpr (ScalarTraits<T>::kExact) {
    os << to_string(v);
  } else {
    os << json(v).dump();
  }
}

}  // namespace

template <class T>
void write_parameter_csv(std::ostream& os, const Parameter<T>& p) {
  os << "layer,row,col,value\n";
  for (size_t l = 0; l < p.depth(); ++l) {
    const auto& a = p.layer(l);
    for (size_t r = 0; r < a.rows(); ++r)
      for (size_t c = 0; c < a.cols(); ++c) {
        os << l << ',' << r << ',' << c << ',';
        write_scalar(os, a(r, c));
        os << '\n';
      }
  }
}

template <class T>
void write_jacobian_csv(std::ostream& os, const Parameter<T>& p, const Matrix<T>& jac) {
  const size_t out = p.arch().output_dim();
  os << "point,output,layer,row,col,value\n";
  for (size_t i = 0; i < jac.rows(); ++i) {
    size_t j = 0;
    for (size_t l = 0; l < p.depth(); ++l) {
      const auto& a = p.layer(l);
      for (size_t r = 0; r < a.rows(); ++r)
        for (size_t c = 0; c < a.cols(); ++c, ++j) {
          os << i / out << ',' << i % out << ',' << l << ',' << r << ',' << c << ',';
          write_scalar(os, jac(i, j));
          os << '\n';
        }
    }
  }
}

#define FUNDIM_INSTANTIATE_IO(T)                                                   \
  template std::vector<T> parse_point(const std::string&);                          \
  template json to_json(const std::vector<T>&);                                     \
  template json to_json(const Matrix<T>&);                                          \
  template json to_json(const RankReport<T>&);                                      \
  template json to_json(const Complex1D<T>&);                                       \
  template void write_parameter_csv(std::ostream&, const Parameter<T>&);            \
  template void write_jacobian_csv(std::ostream&, const Parameter<T>&, const Matrix<T>&);

FUNDIM_INSTANTIATE_IO(Rational)
FUNDIM_INSTANTIATE_IO(double)

}  // namespace fundim
