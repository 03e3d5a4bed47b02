// Command-line front end: kernel grids, constants, verification reports.
#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <charconv>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "subfinsler/checks.hpp"
#include "subfinsler/fundsol.hpp"
#include "subfinsler/kernel.hpp"

using json = nlohmann::ordered_json;
using namespace subfinsler;

namespace {

json default_config() {
  return json{
      {"space",
       {{"m", 2},
        {"k", 1},
        {"alpha", 1.0},
        {"p", 2.0},
        {"phi", {{"kind", "euclidean"}}},
        {"psi", {{"kind", "euclidean"}}}}},
      {"quadrature", {{"rel_tol", 1e-10}, {"abs_tol", 1e-300}}},
      {"grid", {{"r", {0.5, 1.0}}, {"s", {0.0, 0.5}}, {"t", {1.0}}}},
      {"seed", 12345}};
}

NormSpec parse_norm(const json& j, int dim) {
  NormSpec spec;
  spec.kind = j.value("kind", "euclidean");
  spec.dim = dim;
  if (spec.kind == "quadratic") {
    auto rows = j.at("matrix");
    spec.matrix = Mat(rows.size(), rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t c = 0; c < rows.size(); ++c)
        spec.matrix((int)i, (int)c) = rows[i][c].get<double>();
  } else if (spec.kind == "pnorm") {
    spec.p = j.at("p").get<double>();
  } else if (spec.kind == "quartic_perturbation") {
    spec.eps = j.at("eps").get<double>();
  }
  return spec;
}

ProductSpaceConfig parse_space(const json& cfg) {
  const json& sp = cfg.at("space");
  int m = sp.at("m").get<int>();
  int k = sp.at("k").get<int>();
  if (m < 1 || k < 1) throw std::invalid_argument("space: m, k must be >= 1");
  double alpha = sp.value("alpha", 1.0);
  double p = sp.value("p", 2.0);
  auto phi = make_builtin_norm(parse_norm(sp.value("phi", json{{"kind", "euclidean"}}), m));
  auto psi = make_builtin_norm(parse_norm(sp.value("psi", json{{"kind", "euclidean"}}), k));
  return make_product_space(phi, psi, alpha, p);
}

QuadratureSpec parse_quadrature(const json& cfg) {
  QuadratureSpec spec;
  if (cfg.contains("quadrature")) {
    spec.rel_tol = cfg["quadrature"].value("rel_tol", spec.rel_tol);
    spec.abs_tol = cfg["quadrature"].value("abs_tol", spec.abs_tol);
  }
  return spec;
}

json load_config(const std::string& path) {
  if (path.empty()) return default_config();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return json::parse(in);
}

int cmd_kernel_grid(const json& cfg, const std::string& out_path) {
  auto space = parse_space(cfg);
  auto quad = parse_quadrature(cfg);
  std::vector<double> rs, ss, ts;
  if (cfg.contains("grid")) {
    for (const auto& v : cfg["grid"].value("r", json::array())) rs.push_back(v.get<double>());
    for (const auto& v : cfg["grid"].value("s", json::array())) ss.push_back(v.get<double>());
    for (const auto& v : cfg["grid"].value("t", json::array())) ts.push_back(v.get<double>());
  }
  std::ostringstream csv;
  csv << "r,s,t,value,error_estimate\n";
  double ratio = euclidean_sphere_measure(space.m) * euclidean_sphere_measure(space.k) /
                 (space.sigma_phi * space.sigma_psi);
  bool had_error = false;
  auto fmt = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  for (double t : ts)
    for (double s : ss)
      for (double r : rs) {
        try {
          KernelEvaluation e = kernel_profile(space.m, space.k, r, s, t, quad);
          csv << fmt(r) << ',' << fmt(s) << ',' << fmt(t) << ','
              << fmt(ratio * e.value) << ',' << fmt(ratio * e.abs_error_estimate)
              << '\n';
        } catch (const std::exception& ex) {
          csv << fmt(r) << ',' << fmt(s) << ',' << fmt(t) << ",ERROR,"
              << '"' << ex.what() << '"' << '\n';
          had_error = true;
        }
      }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path);
    out << csv.str();
  }
  return had_error ? 1 : 0;
}

int cmd_constants(const json& cfg, const std::string& out_path) {
  auto space = parse_space(cfg);
  FundamentalConstants fc = fundamental_constants(space);
  json out{{"m", space.m},
           {"k", space.k},
           {"alpha", space.alpha},
           {"p", space.p},
           {"Q", space.homogeneous_dim()},
           {"sigma_phi", space.sigma_phi},
           {"sigma_psi", space.sigma_psi},
           {"sigma_alpha_p", fc.sigma_ap},
           {"c_alpha_p", fc.c_ap},
           {"branch", fc.branch == "log" ? "p_eq_Q" : "p_ne_Q"}};
  if (space.alpha == 1.0 && space.p == 2.0)
    out["c12_gamma_route"] = c12_gamma_route(space);
  std::string text = out.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path);
    f << text;
  }
  return 0;
}

int cmd_verify(const json& cfg, std::vector<std::string> checks, int jobs,
               unsigned seed, const std::string& out_path) {
  if (checks.size() == 1 && checks[0] == "all") checks = all_check_names();
  auto known = all_check_names();
  for (const auto& c : checks)
    if (std::find(known.begin(), known.end(), c) == known.end())
      throw std::invalid_argument("unknown check name: " + c);
  std::sort(checks.begin(), checks.end());
  (void)cfg;

  std::vector<CheckResult> results(checks.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= checks.size()) break;
      try {
        results[i] = run_check(checks[i], seed);
      } catch (const std::exception& ex) {
        results[i].name = checks[i];
        results[i].residual = std::numeric_limits<double>::infinity();
        results[i].pass = false;
        std::cerr << "check " << checks[i] << " raised: " << ex.what() << "\n";
      }
    }
  };
  int nthreads = std::max(1, std::min<int>(jobs, (int)checks.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  bool all_pass = true;
  json list = json::array();
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    list.push_back(json{{"name", r.name},
                        {"residual", r.residual},
                        {"threshold", r.threshold},
                        {"pass", r.pass},
                        {"runtime_ms", r.runtime_ms}});
  }
  json report{{"seed", seed}, {"all_pass", all_pass}, {"checks", list}};
  std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path);
    f << text;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Finsler heat kernel evaluation and verification"};
  app.require_subcommand(1);

  std::string config_path, out_path, checks_arg = "all";
  int jobs = 1;
  unsigned seed = 12345;
  bool print_defaults = false;
  double corrupt_sigma = 1.0;

  auto* grid = app.add_subcommand("kernel-grid", "evaluate the kernel on a grid, CSV out");
  grid->add_option("--config", config_path, "JSON config file");
  grid->add_option("--out", out_path, "output CSV path (default stdout)");

  auto* consts = app.add_subcommand("constants", "print closed-form constants as JSON");
  consts->add_option("--config", config_path, "JSON config file");
  consts->add_option("--out", out_path, "output JSON path (default stdout)");
  consts->add_flag("--print-defaults", print_defaults, "print the default config and exit");

  auto* verify = app.add_subcommand("verify", "run verification suites, JSON report");
  verify->add_option("--config", config_path, "JSON config file");
  verify->add_option("--checks", checks_arg, "comma list of checks, or 'all'");
  verify->add_option("--jobs", jobs, "max concurrent checks")->check(CLI::Range(1, 64));
  verify->add_option("--seed", seed, "seed for randomized sampling");
  verify->add_option("--out", out_path, "output JSON path (default stdout)");
  verify->add_option("--corrupt-sigma", corrupt_sigma,
                     "fault-injection: scale sigma_{alpha,p} in constants_identity")
      ->group("");  // hidden: test harness hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (print_defaults) {
      std::cout << default_config().dump(2) << "\n";
      return 0;
    }
    json cfg = load_config(config_path);
    if (grid->parsed()) return cmd_kernel_grid(cfg, out_path);
    if (consts->parsed()) return cmd_constants(cfg, out_path);
    if (verify->parsed()) {
      corrupt_sigma_factor() = corrupt_sigma;
      std::vector<std::string> checks;
      std::stringstream ss(checks_arg);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) checks.push_back(item);
      return cmd_verify(cfg, checks, jobs, seed, out_path);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}
