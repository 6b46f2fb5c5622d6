#include "lvr/domains.hpp"
#include "lvr/forests.hpp"
#include "lvr/matrix_model.hpp"
#include "lvr/perturbation.hpp"
#include "lvr/resummation.hpp"
#include "lvr/series.hpp"
#include "lvr/weingarten.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

using json = nlohmann::json;
using namespace lvr;

namespace {

constexpr const char* kSchema = "lvr.run/1";

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Output {
  json result = json::object();
  std::optional<std::string> text;  // bare value for the default format
  Table table;                       // CSV view; empty header means "flatten result"
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

json cjson(cdouble z) { return json::array({z.real(), z.imag()}); }

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_csv(std::ostream& os, const Table& t) {
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
    os << "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

Table flatten(const json& j) {
  Table t{{"key", "value"}, {}};
  const json flat = j.flatten();
  for (const auto& [key, v] : flat.items()) t.rows.push_back({key, v.is_string() ? v.get<std::string>() : v.dump()});
  return t;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

json config_of(const CLI::App& sub) {
  json cfg = json::object();
  cfg["subcommand"] = sub.get_name();
  for (const CLI::Option* o : sub.get_options()) {
    const std::string name = o->get_lnames().empty() ? "" : o->get_lnames().front();
    if (name.empty() || name == "help") continue;
    if (o->count() > 0)
      cfg[name] = o->results();
    else if (!o->get_default_str().empty())
      cfg[name] = o->get_default_str();
  }
  return cfg;
}

std::string hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

cdouble complex_arg(const std::vector<double>& v) {
  require(v.size() == 1 || v.size() == 2, "complex values take one or two numbers (re [im])");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

json mc_json(const McEstimate& e) {
  return {{"value", cjson(e.value)},
          {"std_error", e.std_error},
          {"samples", e.samples},
          {"seed", e.seed},
          {"effective_sample_size", e.effective_sample_size}};
}

json comparison_json(const Comparison& c) { return {{"lhs", cjson(c.lhs)}, {"rhs", cjson(c.rhs)}, {"diff", c.diff}}; }

std::vector<std::pair<int, int>> parse_edges(const std::vector<std::string>& items) {
  std::vector<std::pair<int, int>> out;
  for (const auto& e : items) {
    const auto dash = e.find('-');
    require(dash != std::string::npos, "edge '" + e + "' must look like i-j");
    try {
      out.emplace_back(std::stoi(e.substr(0, dash)), std::stoi(e.substr(dash + 1)));
    } catch (const std::logic_error&) {
      throw InvalidArgument("edge '" + e + "' must look like i-j");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop vertex representation toolkit"};
  app.set_config("--config", "", "key=value file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "auto";
  std::string out_path;
  int threads = 0;
  app.add_option("--format", format, "auto | json | csv")->check(CLI::IsMember({"auto", "json", "csv"}));
  app.add_option("--out", out_path, "write the record here instead of stdout");
  app.add_option("--threads", threads, "OpenMP worker count (0 keeps the default)");

  // Shared knobs, registered per subcommand so they appear in its config.
  int p = 2, N = 1, k = 0, n = 5, order = 2, ceiling = -1, samples = 100000;
  std::uint64_t seed = 1;
  std::vector<double> lambda{0.1, 0.0};
  auto add_p = [&](CLI::App* s) { s->add_option("--p", p, "interaction degree")->capture_default_str(); };
  auto add_N = [&](CLI::App* s) { s->add_option("--N", N, "matrix size")->capture_default_str(); };
  auto add_lambda = [&](CLI::App* s) {
    s->add_option("--lambda", lambda, "coupling: re [im]")->expected(1, 2)->capture_default_str();
  };
  auto add_mc = [&](CLI::App* s) {
    s->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();
    s->add_option("--seed", seed, "RNG seed")->capture_default_str();
  };
  std::function<Output()> run;

  auto* fc = app.add_subcommand("fuss-catalan", "Fuss-Catalan number or series");
  bool fc_series = false;
  add_p(fc);
  fc->add_option("--n", n, "index")->capture_default_str();
  fc->add_flag("--series", fc_series, "emit coefficients 0..n");
  fc->callback([&] {
    run = [&] {
      Output o;
      if (fc_series) {
        o.result["series"] = to_json(fuss_catalan_series(p, n + 1));
        o.table.header = {"n", "value"};
        for (int i = 0; i <= n; ++i) o.table.rows.push_back({std::to_string(i), to_string(fuss_catalan(p, i))});
      } else {
        const std::string v = to_string(fuss_catalan(p, n));
        o.result["value"] = v;
        o.text = v;
      }
      return o;
    };
  });

  auto* tp = app.add_subcommand("tp", "Principal branch of T_p");
  std::vector<double> z{0.1, 0.0};
  add_p(tp);
  tp->add_option("--z", z, "argument: re [im]")->expected(1, 2)->capture_default_str();
  tp->callback([&] {
    run = [&] {
      Output o;
      const cdouble t = tp_eval(p, complex_arg(z));
      o.result = {{"value", cjson(t)}, {"branch_point", tp_branch_point(p)}};
      return o;
    };
  });

  auto* dom = app.add_subcommand("domains", "Cardioid membership and boundary dump");
  int boundary = 201;
  add_p(dom);
  add_lambda(dom);
  dom->add_option("--boundary-samples", boundary, "boundary points")->capture_default_str();
  dom->callback([&] {
    run = [&] {
      Output o;
      const cdouble l = complex_arg(lambda);
      const SokalDomainSpec d = cardioid_as_sokal(p);
      o.result = {{"lambda", cjson(l)},
                  {"in_cardioid", in_cardioid(p, l)},
                  {"sokal", {{"q", d.q}, {"R", d.R}}},
                  {"boundary_samples", boundary}};
      o.table.header = {"theta", "re", "im"};
      for (const auto& b : cardioid_boundary(p, boundary))
        o.table.rows.push_back({num(b.theta), num(b.point.real()), num(b.point.imag())});
      return o;
    };
  });

  auto* wg = app.add_subcommand("wg", "Weingarten function");
  std::vector<int> cycle{1};
  wg->add_option("--cycle-type", cycle, "cycle type, e.g. 2 1")->expected(1, -1)->capture_default_str();
  add_N(wg);
  wg->callback([&] {
    run = [&] {
      Output o;
      const std::string v = to_string(weingarten(IntegerPartition(cycle), N));
      o.result["value"] = v;
      o.text = v;
      return o;
    };
  });

  auto* bk = app.add_subcommand("bkar-verify", "Forest formula against exp(sum c_ij) at x = 1");
  int bk_n = 3;
  double scale = 0.5;
  bk->add_option("--n", bk_n, "vertices")->capture_default_str();
  bk->add_option("--scale", scale, "c_ij drawn uniformly from [-scale, scale]")->capture_default_str();
  bk->add_option("--seed", seed, "RNG seed")->capture_default_str();
  bk->callback([&] {
    run = [&] {
      require(bk_n >= 1, "--n must be >= 1");
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-scale, scale);
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(bk_n, bk_n);
      double exact = 0.0;
      for (int i = 0; i < bk_n; ++i)
        for (int j = 0; j < bk_n; ++j)
          if (i != j) exact += c(i, j) = u(rng);
      const BkarResult r = bkar_expand(exponential_functional(c));
      Output o;
      o.result = {{"expansion", r.value},
                  {"error_estimate", r.error_estimate},
                  {"forests", r.forests},
                  {"exact", std::exp(exact)},
                  {"diff", std::abs(r.value - std::exp(exact))}};
      return o;
    };
  });

  auto* mc = app.add_subcommand("mc", "Monte Carlo partition function or cumulant");
  std::vector<int> pa, pb, pc, pd;
  bool transposed = false, lvr_form = false;
  add_p(mc);
  add_N(mc);
  add_lambda(mc);
  add_mc(mc);
  mc->add_option("--a", pa, "row indices of M entries (cumulant)");
  mc->add_option("--b", pb, "column indices of M entries");
  mc->add_option("--c", pc, "row indices of conj(M) entries");
  mc->add_option("--d", pd, "column indices of conj(M) entries");
  mc->add_flag("--transposed", transposed, "use M_{b a} for the M entries");
  mc->add_flag("--lvr", lvr_form, "estimate Z as <exp(S)> with the loop vertex action");
  mc->callback([&] {
    run = [&] {
      const ModelParams params{p, N, complex_arg(lambda)};
      McResult r;
      if (pa.empty()) {
        r = lvr_form ? mc_partition_lvr(params, seed, samples) : mc_partition(params, seed, samples);
      } else {
        r = mc_cumulant(params, {pa, pb, pc, pd, transposed}, seed, samples);
      }
      Output o;
      o.result = {{"quantity", pa.empty() ? "partition" : "cumulant"}, {"estimate", mc_json(r.estimate)}};
      if (!r.warning.empty()) o.result["warning"] = r.warning;
      return o;
    };
  });

  auto* pt = app.add_subcommand("perturb", "Graph-weighted perturbative series");
  std::optional<int> at_N;
  add_p(pt);
  pt->add_option("--k", k, "source pairs")->capture_default_str();
  pt->add_option("--order", order, "highest order")->capture_default_str();
  pt->add_option("--order-ceiling", ceiling, "raise the default order ceiling")->capture_default_str();
  pt->add_option("--at-N", at_N, "also evaluate the coefficients at this N");
  pt->callback([&] {
    run = [&] {
      PerturbationOptions opts;
      opts.order_ceiling = ceiling;
      const GraphWeightedSeries s = perturbative_series(p, k, order, opts);
      Output o;
      o.result = s.to_json();
      o.table.header = {"order", "invariant", "graphs", "polynomial"};
      if (at_N) o.table.header.push_back("value");
      json evaluated = json::array();
      for (const auto& t : s.orders) {
        for (const auto& [inv, poly] : t.by_invariant) {
          std::vector<std::string> row{std::to_string(t.order), inv.str(), std::to_string(t.graphs), poly.str()};
          if (at_N) {
            row.push_back(to_string(poly.at(*at_N)));
            evaluated.push_back({{"order", t.order}, {"invariant", inv.str()}, {"value", row.back()}});
          }
          o.table.rows.push_back(std::move(row));
        }
      }
      if (at_N) o.result["at_N"] = {{"N", *at_N}, {"coefficients", evaluated}};
      return o;
    };
  });

  auto* am = app.add_subcommand("amplitude", "Tree amplitude on loop vertices");
  int vertices = 1, w_nodes = 6;
  std::vector<std::string> edges;
  std::vector<int> cilia, pi_parts;
  add_p(am);
  add_N(am);
  add_lambda(am);
  add_mc(am);
  am->add_option("--vertices", vertices, "loop vertices")->capture_default_str();
  am->add_option("--edges", edges, "tree edges as i-j");
  am->add_option("--cilia", cilia, "vertices carrying a cilium");
  am->add_option("--pi", pi_parts, "trace invariant partition");
  am->add_option("--w-nodes", w_nodes, "Gauss-Legendre nodes per edge")->capture_default_str();
  am->callback([&] {
    run = [&] {
      TreeAmplitudeOptions opts;
      opts.w_nodes = w_nodes;
      const TreeAmplitude a = tree_amplitude_mc(loop_tree(vertices, parse_edges(edges), cilia),
                                                IntegerPartition(pi_parts), {p, N, complex_arg(lambda)}, seed,
                                                samples, opts);
      Output o;
      o.result = {{"vertices", a.vertices},
                  {"edges", a.edges},
                  {"k", a.k},
                  {"pi", a.pi.str()},
                  {"estimate", mc_json(a.value)},
                  {"bound", a.bound},
                  {"within_bound", a.within_bound()}};
      if (!a.warning.empty()) o.result["warning"] = a.warning;
      return o;
    };
  });

  auto* rm = app.add_subcommand("remainder", "Remainder estimates and sigma fits");
  std::vector<double> panel;
  int q = -1;
  add_p(rm);
  add_N(rm);
  add_mc(rm);
  rm->add_option("--k", k, "cumulant order (0: log Z, 1: two-point)")->capture_default_str();
  rm->add_option("--n", n, "highest truncation order")->capture_default_str();
  rm->add_option("--lambda", lambda, "coupling (real)")->expected(1)->capture_default_str();
  rm->add_option("--panel", panel, "fit the N = 1 series for Z over these couplings");
  rm->add_option("--q", q, "LeRoy order of the fit (default p - 1)")->capture_default_str();
  rm->callback([&] {
    run = [&] {
      Output o;
      if (!panel.empty()) {
        const RemainderFit f = remainder_bound_fit([&](double l) { return z_quadrature_n1(p, l).real(); },
                                                   toy_series(p, n + 1), q < 0 ? p - 1 : q, panel, n);
        o.result = {{"q", f.q},
                    {"panel", f.panel},
                    {"n_max", f.n_max},
                    {"sigma", f.sigma},
                    {"remainder", f.remainder},
                    {"sigma_needed", f.sigma_needed},
                    {"slack", f.slack},
                    {"failure_rows", f.failure_rows}};
        o.table.header = {"n"};
        for (double l : panel) o.table.header.push_back(num(l));
        for (int i = 0; i <= f.n_max; ++i) {
          std::vector<std::string> row{std::to_string(i)};
          for (double r : f.remainder[i]) row.push_back(num(r));
          o.table.rows.push_back(std::move(row));
        }
        return o;
      }
      const RemainderReport r = remainder_estimate(p, k, n, lambda.at(0), N, seed, samples);
      json rows = json::array();
      o.table.header = {"n", "partial_sum", "remainder", "sigma_needed"};
      for (const auto& row : r.rows) {
        rows.push_back({{"n", row.n},
                        {"partial_sum", row.partial_sum},
                        {"remainder", row.remainder},
                        {"sigma_needed", row.sigma_needed}});
        if (row.n == 0) rows.back()["holds_at_n0"] = row.holds_at_n0;
        o.table.rows.push_back({std::to_string(row.n), num(row.partial_sum), num(row.remainder), num(row.sigma_needed)});
      }
      o.result = {{"oracle", r.oracle}, {"oracle_error", r.oracle_error}, {"rows", rows}, {"sigma", r.sigma}};
      return o;
    };
  });

  auto* bo = app.add_subcommand("borel", "Borel-LeRoy sum of the N = 1 series");
  int coeffs = 12, L = -1, M = -1;
  bool closed = false;
  add_p(bo);
  add_lambda(bo);
  bo->add_option("--q", q, "LeRoy order (default p - 1)")->capture_default_str();
  bo->add_option("--coeffs", coeffs, "series coefficients used")->capture_default_str();
  bo->add_option("--L", L, "numerator degree (default near-diagonal)")->capture_default_str();
  bo->add_option("--M", M, "denominator degree")->capture_default_str();
  bo->add_flag("--closed-form", closed, "use B(t) = (1 + 4t)^(-1/2) (p = 2, q = 1)");
  bo->callback([&] {
    run = [&] {
      const int qq = q < 0 ? p - 1 : q;
      const cdouble l = complex_arg(lambda);
      const RationalSeries series = toy_series(p, coeffs);
      BorelSummation s;
      json poles = json::array();
      if (closed) {
        require(p == 2 && qq == 1, "--closed-form needs p = 2 and q = 1");
        s = borel_closed_form(series, 1, [](cdouble t) { return 1.0 / std::sqrt(1.0 + 4.0 * t); }, "(1+4t)^(-1/2)");
      } else {
        const int mm = M < 0 ? coeffs / 2 : M;
        const int ll = L < 0 ? coeffs - 1 - mm : L;
        s = borel_pade(series, qq, ll, mm);
        for (const auto& z : pade_continuation(s.transform, ll, mm).poles) poles.push_back(cjson(z));
      }
      const BorelValue v = borel_sum(s, l);
      const cdouble oracle = z_quadrature_n1(p, l);
      Output o;
      o.result = {{"continuation", s.description},
                  {"q", qq},
                  {"value", cjson(v.value)},
                  {"error_estimate", v.error_estimate},
                  {"oracle", cjson(oracle)},
                  {"diff", std::abs(v.value - oracle)},
                  {"poles", poles}};
      return o;
    };
  });

  auto* p1 = app.add_subcommand("verify-prop1", "Z(lambda, 1) against the loop-vertex form");
  add_p(p1);
  add_lambda(p1);
  p1->callback([&] {
    run = [&] {
      Output o;
      o.result = comparison_json(verify_prop1_n1(p, complex_arg(lambda)));
      return o;
    };
  });

  auto* vs = app.add_subcommand("verify-sources", "Sourced change of variables at N = 1");
  std::vector<double> J{0.3, 0.0};
  add_p(vs);
  add_lambda(vs);
  vs->add_option("--J", J, "source: re [im]")->expected(1, 2)->capture_default_str();
  vs->callback([&] {
    run = [&] {
      Output o;
      o.result = comparison_json(verify_source_change_of_variables(p, complex_arg(lambda), complex_arg(J)));
      return o;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (threads > 0) omp_set_num_threads(threads);

  const CLI::App* sub = app.get_subcommands().front();
  const json config = config_of(*sub);
  const std::string hash = hex(fnv1a(config.dump()));

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) {
      std::cerr << "cannot open output file " << out_path << "\n";
      return 3;
    }
  }
  std::ostream& os = out_path.empty() ? std::cout : file;

  try {
    const Output o = run();
    if (format == "csv") {
      write_csv(os, o.table.header.empty() ? flatten(o.result) : o.table);
    } else if (format == "auto" && o.text) {
      os << *o.text << "\n";
    } else {
      json record = {{"schema", kSchema}, {"config", config}, {"config_hash", hash}, {"result", o.result}};
      os << record.dump(2) << "\n";
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    const std::string kind = dynamic_cast<const ResourceLimit*>(&e) ? "resource_limit"
                             : dynamic_cast<const NumericError*>(&e) ? "numeric_error"
                                                                     : "error";
    json record = {{"schema", kSchema},
                   {"config", config},
                   {"config_hash", hash},
                   {"error", {{"type", kind}, {"message", e.what()}}}};
    os << record.dump(2) << "\n";
    return 3;
  }
  if (!os) {
    std::cerr << "write failed" << (out_path.empty() ? "" : " for " + out_path) << "\n";
    return 3;
  }
  return 0;
}
