#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fundim/errors.hpp"
#include "fundim/experiments.hpp"
#include "fundim/funcdim.hpp"
#include "fundim/io.hpp"
#include "fundim/ntk.hpp"
#include "fundim/pwl_complex.hpp"
#include "fundim/symmetry.hpp"
#include "fundim/worked_examples.hpp"

namespace fundim::cli {

using nlohmann::json;

namespace {

struct Options {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string output;
  std::string mode;  // expected scalar mode of --net, empty: as in file
  double tol = kDefaultRankTol;
  double zero_tol = kDefaultZeroTol;

  std::string net;
  std::string x, y;
  std::vector<std::string> points;
  bool permissive = false;

  std::string strategy = "random";
  size_t max_points = 0;
  size_t patience = 0;
  bool positive = false;

  bool fd = false;
  double h = 1e-6;

  std::string probe_eps;
  size_t probe_trials = 0;
  bool sv = false;

  size_t samples = 4000;
  std::string box = "-10,10";

  std::vector<std::string> steps;
  size_t grid = 41;
  bool fiber_abs = false;
  std::string save;

  std::string widths;
  size_t trials = 0;
  size_t len = 5;
  size_t n1 = 2, n2 = 3;
  std::string radii = "0.1,0.01,0.001";
  size_t perturbations = 20;
};

std::vector<size_t> parse_widths(const std::string& text) {
  std::vector<size_t> w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
    }
    if (used != item.size() || v < 1) throw std::invalid_argument("bad width '" + item + "'");
    w.push_back(static_cast<size_t>(v));
  }
  return w;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double d = 0;
    try {
      d = std::stod(item, &used);
    } catch (const std::exception&) {
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    v.push_back(d);
  }
  return v;
}

// Points: each --points value holds one or more points separated by ';'.
template <class T>
Batch<T> parse_batch(const std::vector<std::string>& items) {
  Batch<T> z;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string pt;
    while (std::getline(ss, pt, ';')) {
      if (!pt.empty()) z.push_back(parse_point<T>(pt));
    }
  }
  return z;
}

json config_of(const CLI::App* app) {
  json cfg = json::object();
  for (const CLI::App* a = app; a; a = a->get_parent()) {
    for (const CLI::Option* opt : a->get_options()) {
      if (opt->get_name() == "--help") continue;
      std::string key = opt->get_name();
      while (!key.empty() && key.front() == '-') key.erase(0, 1);
      if (cfg.contains(key)) continue;
      // Unset options are recorded with their defaults so a report can be replayed.
      if (opt->count() == 0) {
        if (!opt->get_default_str().empty()) cfg[key] = opt->get_default_str();
        continue;
      }
      const auto& res = opt->results();
      if (opt->get_type_size() == 0) {
        cfg[key] = true;
      } else {
        cfg[key] = res.size() == 1 ? json(res[0]) : json(res);
      }
    }
  }
  std::vector<std::string> path;
  for (const CLI::App* a = app; a && a->get_parent(); a = a->get_parent()) {
    path.insert(path.begin(), a->get_name());
  }
  std::string command;
  for (const auto& p : path) command += (command.empty() ? "" : " ") + p;
  cfg["command"] = command;
  return cfg;
}

class Runner {
 public:
  Runner(Options& o, std::ostream& out) : o_(o), out_(out) {}

  void emit_json(json report, const CLI::App* app) {
    report["config"] = config_of(app);
    write(report.dump(2) + "\n");
  }

  void write(const std::string& text) {
    if (o_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(o_.output);
    if (!f) throw std::runtime_error("cannot write " + o_.output);
    f << text;
  }

  AnyParameter network() const {
    if (o_.net.empty()) throw std::invalid_argument("--net is required");
    std::optional<ScalarMode> expected;
    if (!o_.mode.empty()) expected = parse_scalar_mode(o_.mode);
    return load_network(o_.net, expected);
  }

  void require_json(const char* what) const {
    if (o_.format != "json") {
      throw std::invalid_argument(std::string(what) + " supports --format json only");
    }
  }

  SmoothnessPolicy policy() const {
    return o_.permissive ? SmoothnessPolicy::kPermissive : SmoothnessPolicy::kStrict;
  }

  void eval(const CLI::App* app) {
    std::visit(
        [&](const auto& p) {
          using T = typename std::decay_t<decltype(p)>::Scalar;
          const auto x = parse_point<T>(o_.x);
          const ForwardTrace<T> tr = forward(p, std::span<const T>(x), o_.zero_tol);
          if (o_.format == "csv") {
            std::ostringstream os;
            os << "output,value\n";
            for (size_t r = 0; r < tr.output().size(); ++r) {
              os << r << ',' << scalar_json(tr.output()[r]).dump() << '\n';
            }
            write(os.str());
            return;
          }
          emit_json({{"output", to_json(tr.output())}, {"label", to_json(tr.label)}}, app);
        },
        network());
  }

  void label(const CLI::App* app) {
    require_json("label");
    std::visit(
        [&](const auto& p) {
          using T = typename std::decay_t<decltype(p)>::Scalar;
          const auto x = parse_point<T>(o_.x);
          const ForwardTrace<T> tr = forward(p, std::span<const T>(x), o_.zero_tol);
          json pre = json::array();
          for (const auto& y : tr.pre) pre.push_back(to_json(y));
          emit_json({{"label", to_json(tr.label)},
                     {"label_string", tr.label.to_string()},
                     {"pre_activations", pre},
                     {"smoothness",
                      std::string(to_string(smoothness(p, std::span<const T>(x), o_.zero_tol)))}},
                    app);
        },
        network());
  }

  void jacobian(const CLI::App* app) {
    std::visit(
        [&](const auto& p) {
          using T = typename std::decay_t<decltype(p)>::Scalar;
          const Batch<T> z = parse_batch<T>(o_.points);
          if (z.empty()) throw std::invalid_argument("--points is required");
          if (o_.fd) {
            if constexpr (ScalarTraits<T>::kExact) {
              throw std::invalid_argument("--fd needs a float-mode network");
            } else {
              const FdJacobian fd = eval_jacobian_fd(p, z, o_.h);
              if (o_.format == "csv") {
                std::ostringstream os;
                write_jacobian_csv(os, p, fd.value);
                write(os.str());
                return;
              }
              emit_json({{"jacobian", to_json(fd.value)},
                         {"method", "central_differences"},
                         {"h", o_.h},
                         {"flagged_entries", fd.flagged_count()}},
                        app);
              return;
            }
          }
          const Matrix<T> j = eval_jacobian(p, z, policy(), o_.zero_tol);
          if (o_.format == "csv") {
            std::ostringstream os;
            write_jacobian_csv(os, p, j);
            write(os.str());
            return;
          }
          emit_json({{"jacobian", to_json(j)},
                     {"rows", j.rows()},
                     {"cols", j.cols()},
                     {"scalar_mode", std::string(to_string(ScalarTraits<T>::kMode))}},
                    app);
        },
        network());
  }

  void dim(const CLI::App* app) {
    require_json("dim");
    std::visit(
        [&](const auto& p) {
          using T = typename std::decay_t<decltype(p)>::Scalar;
          RankReport<T> r;
          if (o_.strategy == "stochastic" || o_.strategy == "batch") {
            const Batch<T> z = parse_batch<T>(o_.points);
            if (z.empty()) throw std::invalid_argument("--points is required for " + o_.strategy);
            if (o_.strategy == "stochastic" && z.size() != 1) {
              throw std::invalid_argument("stochastic dimension takes exactly one point");
            }
            r = batch_dim(p, z, policy(), o_.tol);
            r.strategy = o_.strategy;
          } else {
            FunctionalDimOptions opts;
            opts.strategy = parse_dim_strategy(o_.strategy);
            opts.seed = o_.seed;
            opts.max_points = o_.max_points;
            opts.patience = o_.patience;
            opts.positive_orthant_only = o_.positive;
            opts.policy = policy();
            opts.tol = o_.tol;
            opts.zero_tol = o_.zero_tol;
            r = functional_dim(p, opts);
          }
          json report = to_json(r);
          report["upper_bound"] = upper_bound(p.arch());
          report["param_dim"] = param_dim(p.arch());
          emit_json(std::move(report), app);
        },
        network());
  }

  void ntk_cmd(const CLI::App* app) {
    require_json("ntk");
    std::visit(
        [&](const auto& p) {
          using T = typename std::decay_t<decltype(p)>::Scalar;
          if (!o_.x.empty() || !o_.y.empty()) {
            if (o_.x.empty() || o_.y.empty()) throw std::invalid_argument("--x and --y go together");
            const Matrix<T> k = ntk(p, parse_point<T>(o_.x), parse_point<T>(o_.y), policy());
            emit_json({{"ntk", to_json(k)}}, app);
            return;
          }
          const Batch<T> z = parse_batch<T>(o_.points);
          if (z.empty()) throw std::invalid_argument("--points (or --x/--y) is required");
          const Matrix<T> k = batch_ntk(p, z, policy());
          const RankEquality eq = verify_rank_equality(p, z, o_.tol);
          FloatMatrix kf;
          if constexpr (ScalarTraits<T>::kExact) {
            kf = to_float(k);
          } else {
            kf = k;
          }
          emit_json({{"batch_ntk", to_json(k)},
                     {"jac_rank", eq.jac_rank},
                     {"ntk_rank", eq.ntk_rank},
                     {"equal", eq.equal()},
                     {"min_eigenvalue", min_eigenvalue(kf)}},
                    app);
        },
        network());
  }

  void complex_cmd(const CLI::App* app) {
    require_json("complex");
    std::visit(
        [&](const auto& p) {
          using T = typename std::decay_t<decltype(p)>::Scalar;
          const Complex1D<T> c = complex_1d(p, o_.zero_tol);
          json report = to_json(c);
          report["transversal"] = is_transversal_1d(p, c);
          report["generic"] = is_generic_1d(p, c);
          if (!o_.probe_eps.empty()) {
            T eps;
            if constexpr (ScalarTraits<T>::kExact) {
              eps = parse_rational(o_.probe_eps);
            } else {
              eps = parse_point<double>(o_.probe_eps).at(0);
            }
            const auto v =
                probe_combinatorial_stability(p, eps, o_.probe_trials ? o_.probe_trials : 100, o_.seed);
            json probe = {{"stable", v.stable}, {"eps", v.eps}, {"trials", v.trials},
                          {"reason", v.reason}};
            if (v.witness) probe["witness"] = to_json(*v.witness);
            report["stability_probe"] = std::move(probe);
          }
          if (o_.sv) report["sv_rank"] = to_json(sv_rank(p, o_.h, kSvRankTol));
          emit_json(std::move(report), app);
        },
        network());
  }

  void decisive(const CLI::App* app) {
    require_json("decisive");
    std::visit(
        [&](const auto& p) {
          using T = typename std::decay_t<decltype(p)>::Scalar;
          DecisiveSet<T> ds;
          json report;
          if (p.arch().input_dim() == 1) {
            ds = decisive_set(p, complex_1d(p, o_.zero_tol), policy(), o_.zero_tol);
            report["source"] = "complex_1d";
          } else {
            const auto b = parse_doubles(o_.box);
            if (b.size() != 2 || !(b[0] < b[1])) throw std::invalid_argument("--box needs lo,hi with lo < hi");
            const auto atlas = discover_regions(p, Box{b[0], b[1]}, o_.samples, o_.seed, o_.zero_tol);
            json insufficient = json::array();
            for (const auto& l : atlas.insufficient) insufficient.push_back(l.to_string());
            report["source"] = "sampled_regions";
            report["regions"] = atlas.regions.size();
            report["insufficient_regions"] = insufficient;
            ds = decisive_set(p, atlas);
          }
          json pts = json::array();
          for (const auto& z : ds.points) pts.push_back(to_json(z));
          report["points"] = pts;
          report["cell_of_point"] = ds.cell_of_point;
          report["skipped_cells"] = ds.skipped;
          emit_json(std::move(report), app);
        },
        network());
  }

  static SymmetryGenerator parse_step(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad --step '" + text + "'");
    const std::string kind = text.substr(0, colon);
    std::vector<std::string> parts;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 3) throw std::invalid_argument("--step needs three values: '" + text + "'");
    const auto idx = [](const std::string& s) {
      size_t used = 0;
      long long v = -1;
      try {
        v = std::stoll(s, &used);
      } catch (const std::exception&) {
      }
      if (used != s.size() || v < 0) throw std::invalid_argument("bad index '" + s + "'");
      return static_cast<size_t>(v);
    };
    if (kind == "perm") return Permutation{idx(parts[0]), idx(parts[1]), idx(parts[2])};
    if (kind == "rescale") return Rescale{idx(parts[0]), idx(parts[1]), parse_rational(parts[2])};
    throw std::invalid_argument("unknown step kind '" + kind + "' (perm|rescale)");
  }

  void symmetry(const CLI::App* app) {
    std::visit(
        [&](const auto& p) {
          using T = typename std::decay_t<decltype(p)>::Scalar;
          json report;
          if (o_.fiber_abs) {
            report["fiber_abs"] = std::string(to_string(fiber_membership_absvalue(p)));
          }
          std::vector<SymmetryGenerator> steps;
          for (const auto& s : o_.steps) steps.push_back(parse_step(s));
          const SymmetryElement g(std::move(steps));
          const Parameter<T> q = apply_symmetry(g, p);
          if (o_.format == "csv") {
            std::ostringstream os;
            write_parameter_csv(os, q);
            write(os.str());
            return;
          }
          if (!o_.save.empty()) save_network(AnyParameter(q), o_.save);
          const Batch<T> grid = input_grid<T>(p.arch().input_dim(), o_.grid);
          report["element"] = g.to_string();
          report["parameter"] = network_to_json(AnyParameter(q));
          report["grid_points"] = grid.size();
          report["invariant_on_grid"] = verify_unmarked_invariance(p, g, grid);
          report["inverse_roundtrip"] = apply_symmetry(g.inverse(), q) == p;
          emit_json(std::move(report), app);
        },
        network());
  }

  void experiment(const CLI::App* app, const std::string& name) {
    require_json("experiment");
    ExperimentReport r;
    if (name == "tightness") {
      r = tightness_search(Architecture(parse_widths(o_.widths)), o_.trials ? o_.trials : 500, o_.seed);
    } else if (name == "upper-bound") {
      r = upper_bound_check(Architecture(parse_widths(o_.widths)), o_.trials ? o_.trials : 1000, o_.seed);
    } else if (name == "ones-chain") {
      r = ones_chain_dim(o_.len, o_.trials ? o_.trials : 200, o_.seed);
    } else if (name == "stably-unactivated") {
      r = stably_unactivated_frequency(Architecture(parse_widths(o_.widths)),
                                       o_.trials ? o_.trials : 100000, o_.seed);
    } else if (name == "depth1") {
      r = depth1_witness(o_.n1, o_.n2, o_.seed, o_.samples);
    } else if (name == "nonordinary") {
      r = nonordinary_demo();
    } else if (name == "semicontinuity") {
      std::optional<RationalParameter> base;
      Architecture arch(parse_widths(o_.widths.empty() ? "1,2,1" : o_.widths));
      if (!o_.net.empty()) {
        base = std::get<RationalParameter>(load_network(o_.net, ScalarMode::kRational));
        arch = base->arch();
      }
      r = semicontinuity_probe(arch, o_.trials ? o_.trials : 50, parse_doubles(o_.radii), o_.seed,
                               o_.perturbations, base);
    } else if (name == "nontransitivity") {
      const auto n = nontransitivity_demo(o_.seed);
      r.name = "nontransitivity";
      r.seed = o_.seed;
      r.trials = n.s2_perturbations;
      r.summary = {{"both_constant_zero", n.both_constant_zero},
                   {"bump_value", to_string(n.bump_value)},
                   {"s2_perturbations", n.s2_perturbations},
                   {"s2_nonzero", n.s2_nonzero}};
      r.verdict = n.holds() ? "confirmed" : "not_confirmed";
    }
    emit_json(to_json(r), app);
  }

  int demo(const CLI::App* app) {
    const auto checks = worked::demo_suite();
    bool all = true;
    for (const auto& c : checks) all = all && c.pass;
    if (o_.format == "json") {
      json rows = json::array();
      for (const auto& c : checks) {
        rows.push_back({{"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"pass", c.pass}});
      }
      emit_json({{"checks", rows}, {"all_pass", all}}, app);
    } else {
      std::ostringstream os;
      size_t width = 0;
      for (const auto& c : checks) width = std::max(width, c.name.size());
      for (const auto& c : checks) {
        os << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width) + 2)
           << c.name << "expected " << c.expected << ", got " << c.actual << '\n';
      }
      os << (all ? "all checks passed" : "some checks FAILED") << '\n';
      write(os.str());
    }
    return all ? 0 : 2;
  }

 private:
  Options& o_;
  std::ostream& out_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Functional dimension of ReLU networks", "fundim"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  app.add_option("-o,--output", o.output, "Write the report to this file");
  app.add_option("--mode", o.mode, "Required scalar mode of the network file")
      ->check(CLI::IsMember({"rational", "float"}));
  app.add_option("--tol", o.tol, "Relative tolerance for numeric rank")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--zero-tol", o.zero_tol, "Float pre-activations at most this size count as 0")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  Runner runner(o, out);
  std::function<int()> action;
  auto net_opt = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--net", o.net, "Network JSON file");
    if (required) opt->required();
  };
  auto on = [&](CLI::App* sub, std::function<void(const CLI::App*)> fn) {
    sub->callback([&action, sub, fn] { action = [sub, fn] { fn(sub); return 0; }; });
  };

  auto* eval = app.add_subcommand("eval", "Evaluate the network at a point");
  net_opt(eval);
  eval->add_option("--x", o.x, "Input point, e.g. 3 or 1,-5/2")->required();
  on(eval, [&](const CLI::App* s) { runner.eval(s); });

  auto* label = app.add_subcommand("label", "Ternary activation label at a point");
  net_opt(label);
  label->add_option("--x", o.x, "Input point")->required();
  on(label, [&](const CLI::App* s) { runner.label(s); });

  auto* jac = app.add_subcommand("jacobian", "Jacobian of the evaluation map");
  net_opt(jac);
  jac->add_option("--points", o.points, "Points, separated by ';' or repeated");
  jac->add_flag("--permissive", o.permissive, "Admit points whose zero neurons are stably dead");
  jac->add_flag("--fd", o.fd, "Central finite differences instead of the closed form");
  jac->add_option("--fd-step", o.h, "Finite-difference step")->check(CLI::PositiveNumber);
  on(jac, [&](const CLI::App* s) { runner.jacobian(s); });

  auto* dim = app.add_subcommand("dim", "Functional dimension");
  net_opt(dim);
  dim->add_option("--strategy", o.strategy, "decisive | random | stochastic | batch")
      ->check(CLI::IsMember({"decisive", "decisive_1d", "random", "random_saturation",
                             "stochastic", "batch"}))
      ->capture_default_str();
  dim->add_option("--points", o.points, "Points for stochastic/batch");
  dim->add_option("--max-points", o.max_points, "Saturation point budget (default 4D)");
  dim->add_option("--patience", o.patience, "Saturation patience (default D)");
  dim->add_flag("--positive", o.positive, "Restrict to the positive orthant");
  dim->add_flag("--permissive", o.permissive, "Admit points whose zero neurons are stably dead");
  on(dim, [&](const CLI::App* s) { runner.dim(s); });

  auto* ntk = app.add_subcommand("ntk", "Neural tangent kernel");
  net_opt(ntk);
  ntk->add_option("--points", o.points, "Batch for the batch kernel");
  ntk->add_option("--x", o.x, "First point of a single kernel entry");
  ntk->add_option("--y", o.y, "Second point of a single kernel entry");
  ntk->add_flag("--permissive", o.permissive, "Admit points whose zero neurons are stably dead");
  on(ntk, [&](const CLI::App* s) { runner.ntk_cmd(s); });

  auto* cx = app.add_subcommand("complex", "Polyhedral complex of a one-input network");
  net_opt(cx);
  cx->add_option("--probe-eps", o.probe_eps, "Run the stability probe with this radius");
  cx->add_option("--probe-trials", o.probe_trials, "Stability probe trials (default 100)");
  cx->add_flag("--sv-rank", o.sv, "Also compute the slopes-and-values rank");
  cx->add_option("--fd-step", o.h, "Finite-difference step for --sv-rank")->check(CLI::PositiveNumber);
  on(cx, [&](const CLI::App* s) { runner.complex_cmd(s); });

  auto* dec = app.add_subcommand("decisive", "Decisive set");
  net_opt(dec);
  dec->add_option("--samples", o.samples, "Samples for region discovery (n_0 > 1)")->capture_default_str();
  dec->add_option("--box", o.box, "Sampling box lo,hi (n_0 > 1)")->capture_default_str();
  dec->add_flag("--permissive", o.permissive, "Admit stably dead zero labels");
  on(dec, [&](const CLI::App* s) { runner.decisive(s); });

  auto* sym = app.add_subcommand("symmetry", "Apply permutation/rescaling symmetries");
  net_opt(sym);
  sym->add_option("--step", o.steps, "perm:LAYER,J,K or rescale:LAYER,NEURON,C (0-based), in order");
  sym->add_option("--grid", o.grid, "Grid points per input axis")->capture_default_str();
  sym->add_flag("--fiber-abs", o.fiber_abs, "Classify membership in the fiber of |x|");
  sym->add_option("--save", o.save, "Write the transformed network here");
  on(sym, [&](const CLI::App* s) { runner.symmetry(s); });

  auto* exp = app.add_subcommand("experiment", "Run an experiment");
  exp->require_subcommand(1);
  for (const char* name : {"tightness", "upper-bound", "ones-chain", "stably-unactivated", "depth1",
                           "nonordinary", "semicontinuity", "nontransitivity"}) {
    auto* e = exp->add_subcommand(name);
    const std::string n = name;
    if (n == "tightness" || n == "upper-bound" || n == "stably-unactivated" || n == "semicontinuity") {
      auto* w = e->add_option("--widths", o.widths, "Architecture, e.g. 3,2,1");
      if (n != "semicontinuity") w->required();
    }
    if (n != "depth1" && n != "nonordinary" && n != "nontransitivity") {
      e->add_option("--trials", o.trials, "Number of trials");
    }
    if (n == "ones-chain") e->add_option("--len", o.len, "Number of ones")->capture_default_str();
    if (n == "depth1") {
      e->add_option("--n1", o.n1, "Input width")->capture_default_str();
      e->add_option("--n2", o.n2, "Output width")->capture_default_str();
      e->add_option("--samples", o.samples, "Region discovery samples")->capture_default_str();
    }
    if (n == "semicontinuity") {
      e->add_option("--radii", o.radii, "Decreasing radii")->capture_default_str();
      e->add_option("--perturbations", o.perturbations, "Perturbations per radius")
          ->capture_default_str();
      e->add_option("--net", o.net, "Fixed base network (rational)");
    }
    on(e, [&runner, n](const CLI::App* s) { runner.experiment(s, n); });
  }

  auto* demo = app.add_subcommand("demo", "Run the worked-example suite");
  demo->callback([&] { action = [&runner, demo] { return runner.demo(demo); }; });
  demo->preparse_callback([&](size_t) {
    if (o.format == "json" && !app.get_option("--format")->count()) o.format = "text";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }
  if (!action) return 1;
  try {
    return action();
  } catch (const AnalysisError& e) {
    err << "analysis error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fundim::cli
