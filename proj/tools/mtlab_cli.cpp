#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtlab/constants.hpp"
#include "mtlab/io.hpp"

using namespace mtlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitError = 2;

struct RunConfig {
  int n = 2;
  int m = 2;
  int N = 4;
  int s = 1;
  std::optional<double> delta;
  std::vector<double> eps = default_eps_sweep();
  std::string eps_text;
  int seeds = 20;
  int iters = 500;
  int resolution = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string file;
  std::string design;
  std::string preset = "simplex";
  std::vector<double> nu;
  double radius = 0.0;
  double margin = 0.0;
  std::string config;
};

// Flags given on the command line; these override the --config file.
struct Flags {
  RunConfig values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App* app) {
    auto& v = values;
    options.emplace_back("n", app->add_option("--n", v.n, "sphere dimension"));
    options.emplace_back("m", app->add_option("--m", v.m, "moment degree"));
    options.emplace_back("N", app->add_option("--N", v.N, "number of points"));
    options.emplace_back("s", app->add_option("--s", v.s, "derivative order"));
    options.emplace_back("delta", app->add_option("--delta", v.delta, "bubble cutoff radius"));
    options.emplace_back("eps", app->add_option("--eps", v.eps_text, "comma-separated decreasing eps list"));
    options.emplace_back("seeds", app->add_option("--seeds", v.seeds, "search restarts"));
    options.emplace_back("iters", app->add_option("--iters", v.iters, "iterations per restart"));
    options.emplace_back("resolution", app->add_option("--resolution", v.resolution, "grid resolution (0 = default)"));
    options.emplace_back("seed", app->add_option("--seed", v.seed, "rng seed"));
    options.emplace_back("out", app->add_option("--out", v.out, "output file"));
    options.emplace_back("file", app->add_option("--file", v.file, "input design or family spec JSON"));
    options.emplace_back("design", app->add_option("--design", v.design, "design JSON used as bubble centers"));
    options.emplace_back("preset", app->add_option("--preset", v.preset, "simplex | antipodal | single")
                                       ->check(CLI::IsMember({"simplex", "antipodal", "single"})));
    options.emplace_back("nu", app->add_option("--nu", v.nu, "comma-separated center weights")->delimiter(','));
    options.emplace_back("radius", app->add_option("--radius", v.radius, "attribution radius (0 = 3 delta)"));
    options.emplace_back("margin", app->add_option("--margin", v.margin, "cutoff ramp width (0 = delta / 5)"));
    options.emplace_back("config", app->add_option("--config", v.config, "JSON config file; flags override"));
  }

  bool given(const std::string& key) const {
    for (const auto& [k, opt] : options)
      if (k == key) return opt->count() > 0;
    return false;
  }
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError(std::string(flag) + ": not a number: " + item);
    }
  }
  return out;
}

ojson read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(path + ": " + e.what());
  }
}

template <class T>
void overlay(const ojson& cfg, const char* key, T& target) {
  if (cfg.contains(key)) target = cfg.at(key).get<T>();
}

RunConfig resolve(const Flags& flags) {
  RunConfig r;
  const std::string config_path = flags.values.config;
  if (!config_path.empty()) {
    const ojson cfg = read_json_file(config_path);
    if (!cfg.is_object()) throw DomainError("config must be a JSON object");
    try {
      overlay(cfg, "n", r.n);
      overlay(cfg, "m", r.m);
      overlay(cfg, "N", r.N);
      overlay(cfg, "s", r.s);
      if (cfg.contains("delta")) r.delta = cfg.at("delta").get<double>();
      overlay(cfg, "eps", r.eps);
      overlay(cfg, "seeds", r.seeds);
      overlay(cfg, "iters", r.iters);
      overlay(cfg, "resolution", r.resolution);
      overlay(cfg, "seed", r.seed);
      overlay(cfg, "out", r.out);
      overlay(cfg, "file", r.file);
      overlay(cfg, "design", r.design);
      overlay(cfg, "preset", r.preset);
      overlay(cfg, "nu", r.nu);
      overlay(cfg, "radius", r.radius);
      overlay(cfg, "margin", r.margin);
    } catch (const nlohmann::json::exception& e) {
      throw DomainError("config: " + std::string(e.what()));
    }
  }
  const RunConfig& f = flags.values;
  if (flags.given("n")) r.n = f.n;
  if (flags.given("m")) r.m = f.m;
  if (flags.given("N")) r.N = f.N;
  if (flags.given("s")) r.s = f.s;
  if (flags.given("delta")) r.delta = f.delta;
  if (flags.given("eps")) r.eps = parse_list(f.eps_text, "--eps");
  if (flags.given("seeds")) r.seeds = f.seeds;
  if (flags.given("iters")) r.iters = f.iters;
  if (flags.given("resolution")) r.resolution = f.resolution;
  if (flags.given("seed")) r.seed = f.seed;
  if (flags.given("out")) r.out = f.out;
  if (flags.given("file")) r.file = f.file;
  if (flags.given("design")) r.design = f.design;
  if (flags.given("preset")) r.preset = f.preset;
  if (flags.given("nu")) r.nu = f.nu;
  if (flags.given("radius")) r.radius = f.radius;
  if (flags.given("margin")) r.margin = f.margin;
  r.config = config_path;
  return r;
}

ojson config_json(const RunConfig& r, const std::string& command) {
  ojson j;
  j["command"] = command;
  j["n"] = r.n;
  j["m"] = r.m;
  j["N"] = r.N;
  j["s"] = r.s;
  j["delta"] = r.delta ? ojson(*r.delta) : ojson(nullptr);
  j["eps"] = r.eps;
  j["seeds"] = r.seeds;
  j["iters"] = r.iters;
  j["resolution"] = r.resolution;
  j["seed"] = r.seed;
  j["out"] = r.out;
  j["file"] = r.file;
  j["design"] = r.design;
  j["preset"] = r.preset;
  j["nu"] = r.nu;
  j["radius"] = r.radius;
  j["margin"] = r.margin;
  j["config"] = r.config;
  return j;
}

void emit(const ojson& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw DomainError("cannot write " + out);
  f << text;
}

QuadratureGrid grid_for(const RunConfig& r, int n) {
  return r.resolution > 0 ? build_grid(n, r.resolution) : build_grid(n);
}

// Centers and weights of the bubble family, with the delta they come with (if any).
struct Source {
  MomentDesign design;
  std::optional<double> delta;
};

Source bubble_source(const RunConfig& r) {
  Source src;
  if (!r.file.empty()) {
    const FamilySpec spec = family_from_json(read_json_file(r.file));
    src.design = spec.design();
    src.delta = spec.delta;
  } else if (!r.design.empty()) {
    src.design = design_from_json(read_json_file(r.design));
  } else if (r.preset == "antipodal") {
    src.design = antipodal_design(r.n);
  } else if (r.preset == "single") {
    src.design.n = r.n;
    src.design.m = 0;
    src.design.points = {SpherePoint::axis(r.n + 1, r.n)};
    src.design.weights = {1.0};
    src.design.residual = 0.0;
  } else {
    src.design = simplex_design(r.n);
  }
  if (!r.nu.empty()) {
    if (r.nu.size() != src.design.size()) throw DomainError("--nu: one weight per center required");
    src.design.weights = r.nu;
    check_design_shape(src.design);
    src.design.residual = moment_residual(src.design);
  }
  return src;
}

double resolved_delta(const RunConfig& r, const Source& src) {
  if (r.delta) return *r.delta;
  if (src.delta) return *src.delta;
  return kDefaultDelta;
}

int cmd_constants(const RunConfig& r) {
  const MTConstants c = mt_constants(r.s, r.n);
  ojson j;
  j["s"] = c.s;
  j["n"] = c.n;
  j["a"] = c.a;
  j["alpha"] = c.alpha;
  j["config"] = config_json(r, "constants");
  emit(j, r.out);
  return kExitOk;
}

int cmd_design_simplex(const RunConfig& r) {
  const MomentDesign d = simplex_design(r.n);
  ojson j = design_json(d);
  j["config"] = config_json(r, "design simplex");
  emit(j, r.out);
  return d.valid() ? kExitOk : kExitInvalid;
}

int cmd_design_search(const RunConfig& r) {
  const SearchResult res = search_design(r.n, r.m, r.N, r.seeds, r.iters, r.seed);
  ojson j = design_json(res.best);
  j["valid"] = res.best.valid();
  j["best_seed"] = res.best_seed;
  j["seed_residuals"] = res.seed_residuals;
  j["config"] = config_json(r, "design search");
  emit(j, r.out);
  if (!res.best.valid()) std::cerr << "no valid design found; best residual " << res.best.residual << "\n";
  return res.best.valid() ? kExitOk : kExitInvalid;
}

int cmd_design_verify(const RunConfig& r) {
  if (r.file.empty()) throw DomainError("design verify: --file is required");
  const MomentDesign d = design_from_json(read_json_file(r.file));
  ojson j = design_json(d);
  j["valid"] = d.valid();
  j["config"] = config_json(r, "design verify");
  emit(j, r.out);
  return d.valid() ? kExitOk : kExitInvalid;
}

int cmd_design_certify(const RunConfig& r) {
  std::vector<SpherePoint> points;
  if (!r.file.empty()) {
    const ojson j = read_json_file(r.file);
    points = detail::require_points(j, "points", detail::require_int(j, "n"));
  } else {
    // random points with zero weighted first moment: the last one balances the rest
    if (r.N < 2) throw DomainError("design certify: require N >= 2");
    std::mt19937_64 rng(r.seed);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    Eigen::VectorXd balance = Eigen::VectorXd::Zero(r.n + 1);
    for (int i = 0; i + 1 < r.N; ++i) {
      points.push_back(random_sphere_point(r.n, rng));
      balance -= weight(rng) * points.back().coords();
    }
    points.push_back(SpherePoint(balance));
  }
  const auto cert = certify_lower_bound(points);
  ojson j = certificate_json(cert);
  j["config"] = config_json(r, "design certify");
  emit(j, r.out);
  return cert && cert->verify() ? kExitOk : kExitInvalid;
}

int cmd_sweep(const RunConfig& r) {
  if (r.eps.empty()) throw DomainError("sweep: empty eps list");
  const Source src = bubble_source(r);
  const double delta = resolved_delta(r, src);
  const QuadratureGrid grid = grid_for(r, src.design.n);
  const SweepResult res = sharpness_sweep(src.design, delta, r.eps, grid, r.margin);

  ojson j;
  j["config"] = config_json(r, "sweep");
  const ojson summary = sweep_summary_json(res);
  for (auto it = summary.begin(); it != summary.end(); ++it) j[it.key()] = it.value();
  if (!r.out.empty()) {
    std::ofstream csv(r.out, std::ios::binary);
    if (!csv) throw DomainError("cannot write " + r.out);
    csv << "# " << j["config"].dump() << "\n";
    write_sweep_csv(csv, res.rows);
    j["csv"] = r.out;
  }
  std::cout << j.dump(2) << "\n";
  if (!res.complete) std::cerr << "sweep stopped early: " << res.failure << "\n";
  return res.complete ? kExitOk : kExitInvalid;
}

int cmd_concentrate(const RunConfig& r) {
  if (r.eps.empty()) throw DomainError("concentrate: empty eps list");
  const Source src = bubble_source(r);
  const double delta = resolved_delta(r, src);
  const double radius = r.radius > 0.0 ? r.radius : 3.0 * delta;
  const QuadratureGrid grid = grid_for(r, src.design.n);
  std::vector<BubbleFamily> families;
  for (double e : r.eps) families.push_back(make_family(src.design, delta, e));
  const auto reports = concentration_profile(families, grid, radius);

  ojson j;
  j["config"] = config_json(r, "concentrate");
  j["radius"] = radius;
  j["reports"] = ojson::array();
  for (const auto& rep : reports) j["reports"].push_back(report_json(rep));
  emit(j, r.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtlab: constrained Moser-Trudinger numerics on spheres"};
  app.require_subcommand(1);

  Flags constants_flags, sweep_flags, conc_flags, simplex_flags, search_flags, verify_flags, certify_flags;
  auto* constants = app.add_subcommand("constants", "Moser-Trudinger constants a_{s,n}, alpha_{s,n}");
  constants_flags.add(constants);
  auto* design = app.add_subcommand("design", "moment designs");
  design->require_subcommand(1);
  auto* simplex = design->add_subcommand("simplex", "regular simplex design");
  simplex_flags.add(simplex);
  auto* search = design->add_subcommand("search", "multistart design search");
  search_flags.add(search);
  auto* verify = design->add_subcommand("verify", "recompute the residual of a design file");
  verify_flags.add(verify);
  auto* certify = design->add_subcommand("certify", "degree-2 infeasibility certificate");
  certify_flags.add(certify);
  auto* sweep = app.add_subcommand("sweep", "sharpness sweep over eps");
  sweep_flags.add(sweep);
  auto* conc = app.add_subcommand("concentrate", "concentration profile over eps");
  conc_flags.add(conc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*constants) return cmd_constants(resolve(constants_flags));
    if (*simplex) return cmd_design_simplex(resolve(simplex_flags));
    if (*search) return cmd_design_search(resolve(search_flags));
    if (*verify) return cmd_design_verify(resolve(verify_flags));
    if (*certify) return cmd_design_certify(resolve(certify_flags));
    if (*sweep) return cmd_sweep(resolve(sweep_flags));
    if (*conc) return cmd_concentrate(resolve(conc_flags));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
