#include "gdm/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "gdm/config.hpp"
#include "gdm/derham.hpp"
#include "gdm/error.hpp"
#include "gdm/measure.hpp"
#include "gdm/parallel.hpp"
#include "gdm/transfer.hpp"

namespace gdm {

using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Domain: return 3;
    case ErrorKind::Validation: return 4;
    case ErrorKind::Budget: return 5;
    case ErrorKind::Convergence: return 6;
    case ErrorKind::Internal: return 70;
  }
  return 70;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Internal, "SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json witness_json(const Witness& w) {
  json j;
  j["path"] = w.path.str();
  j["word"] = w.word.str();
  if (w.symbol >= 0) j["symbol"] = w.symbol;
  if (!w.center.empty()) {
    j["eps0"] = w.eps0;
    j["center"] = w.center;
  }
  j["values"] = w.values;
  if (!w.values_after.empty()) j["values_after"] = w.values_after;
  j["description"] = w.description;
  return j;
}

}  // namespace

json to_json(const ConditionVerdict& v) {
  json j;
  j["condition"] = v.condition;
  j["status"] = to_string(v.status);
  j["resolution"] = {{"depth", v.resolution.depth},
                     {"states", v.resolution.states},
                     {"margin", v.resolution.margin},
                     {"eps0_grid", v.resolution.eps0_grid},
                     {"l_grid", v.resolution.l_grid}};
  j["bounds"] = {{"inf", v.inf}, {"sup", v.sup}};
  j["eps0"] = opt_json(v.eps0);
  j["l"] = v.l ? json(*v.l) : json(nullptr);
  j["word"] = v.word ? json(v.word->str()) : json(nullptr);
  if (!v.target.empty()) j["target"] = v.target;
  json ws = json::array();
  for (const Witness& w : v.witnesses) ws.push_back(witness_json(w));
  j["witness"] = ws;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const DimReport& r) {
  json j;
  j["method"] = r.method;
  j["estimate"] = r.estimate;
  j["ci_halfwidth"] = r.ci_halfwidth;
  j["upper_bound"] = opt_json(r.upper_bound);
  j["lower_bound"] = opt_json(r.lower_bound);
  if (!r.upper_source.empty()) j["upper_source"] = r.upper_source;
  if (!r.lower_source.empty()) j["lower_source"] = r.lower_source;
  j["params"] = r.params;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json to_json(const HellingerResult& h) {
  json j;
  j["comparison"] = h.comparison;
  j["verdict"] = to_string(h.verdict);
  j["paths"] = h.paths.size();
  j["T"] = h.checkpoints.empty() ? 0 : h.checkpoints.back();
  j["growth_fraction"] = h.growth_fraction;
  j["summable_fraction"] = h.summable_fraction;
  j["mean_final_partial_sum"] = h.mean_final;
  j["max_tail_increment"] = h.max_tail_increment;
  return j;
}

json to_json(const SingularityReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["comparison"] = r.comparison;
  j["evidence"] = r.evidence;
  j["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  if (r.ac_parameters) {
    json p = json::array();
    for (const Rational& v : *r.ac_parameters) p.push_back(to_string(v));
    j["ac_parameters"] = p;
  } else {
    j["ac_parameters"] = nullptr;
  }
  j["moebius_C"] = r.moebius_C ? json(to_string(*r.moebius_C)) : json(nullptr);
  j["hellinger"] = r.hellinger ? to_json(*r.hellinger) : json(nullptr);
  j["notes"] = r.notes;
  return j;
}

State parse_state(const DrivenSystem& system, const std::string& text) {
  State s;
  if (system.space.kind == SpaceKind::Circle) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Config, "circle state must be 'x,y'");
    s.x = to_double(parse_rational(text.substr(0, comma)));
    s.y = to_double(parse_rational(text.substr(comma + 1)));
  } else if (text == "inf" || text == "+inf") {
    s.infinite = true;
  } else {
    s.x = to_double(parse_rational(text));
  }
  system.check_state(s);
  return s;
}

namespace {

struct Output {
  std::string path;  // empty: stdout
  std::string content;
};

struct Common {
  std::string system_arg;
  std::string out_path;
  std::string manifest_path;
  std::uint64_t seed = 20240601;
  int threads = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string config_text(const std::string& arg) {
  if (arg.empty()) throw Error(ErrorKind::Config, "--system is required");
  auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return arg;
  return read_file(arg);
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + sha256_hex(content).substr(0, 12);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Config, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::Config, "write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Config, "cannot move output into '" + path + "'");
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json envelope(const std::string& command, const DrivenSystem* system) {
  json j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  if (system) {
    j["system"] = {{"kind", system->kind}, {"label", system->label}, {"N", system->N},
                   {"state_space", system->space.describe()}, {"parameters", system->parameters}};
  }
  return j;
}

const DeRhamSystem& require_derham(const DrivenSystem& s, const std::string& what) {
  if (!s.derham) throw Error(ErrorKind::Config, what + " requires a de Rham system; got kind '" + s.kind + "'");
  return *s.derham;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_rational(s));
  return out;
}

std::vector<Rational> parse_points(const std::string& spec, int N) {
  auto colon = spec.find(':');
  std::string head = colon == std::string::npos ? "" : spec.substr(0, colon);
  std::string tail = colon == std::string::npos ? spec : spec.substr(colon + 1);
  if (head == "dyadic" || head == "nadic") {
    int k = 0;
    try {
      k = std::stoi(tail);
    } catch (...) {
      throw Error(ErrorKind::Config, "bad point spec '" + spec + "'");
    }
    if (k < 0 || k > 20) throw Error(ErrorKind::Config, "grid level must lie in [0, 20]");
    return dyadic_grid(k, head == "dyadic" ? 2 : N);
  }
  if (head == "list" || head.empty()) {
    auto pts = parse_rational_list(tail);
    if (pts.empty()) throw Error(ErrorKind::Config, "empty point list");
    return pts;
  }
  throw Error(ErrorKind::Config, "point spec must be dyadic:k, nadic:k or list:t1,t2,...");
}

std::string default_geometry(const DrivenSystem& s) {
  if (s.kind == "kusuoka") return "gasket";
  return "interval:" + std::to_string(s.N);
}

bool is_minkowski(const DrivenSystem& s) {
  return s.derham && s.derham->matrices == minkowski_system().matrices;
}

// ---------------------------------------------------------------- commands

Output cmd_systems() {
  json j = envelope("systems", nullptr);
  json kinds = json::array();
  for (const KindInfo& k : system_kinds()) kinds.push_back({{"kind", k.kind}, {"params", k.params}, {"summary", k.summary}});
  for (const std::string& t : toy_names()) {
    kinds.push_back({{"kind", "toy:" + t}, {"params", "see toy"}, {"summary", "toy example " + t}});
  }
  j["kinds"] = kinds;
  return {"", dump(j)};
}

struct EvalArgs {
  std::string points = "dyadic:4";
  int depth = 64;
};

Output cmd_eval(const DrivenSystem& s, const EvalArgs& a) {
  auto grid = parse_points(a.points, s.N);
  return {"", distribution_csv(distribution_function(s, grid, a.depth))};
}

struct DimArgs {
  std::string method = "mc";
  int n = 2000;
  int paths = 200;
  long samples = 100000;
  std::string geometry;
  double wA = 0.0;
  int m = 2049;
  double tol = 1e-10;
  std::string state;
  std::string per_path_out;
};

std::vector<Output> cmd_dim(const DrivenSystem& s, const DimArgs& a, const Common& c, int threads) {
  json j = envelope("dim", &s);
  DimReport r;
  std::vector<Output> extra;
  State y0 = a.state.empty() ? s.initial : parse_state(s, a.state);
  IfsGeometry geom = geometry_constants(a.geometry.empty() ? default_geometry(s) : a.geometry, s.N);
  if (geom.maps != s.N) {
    throw Error(ErrorKind::Config, "geometry '" + geom.name + "' has " + std::to_string(geom.maps) + " maps, system has N = " +
                                       std::to_string(s.N));
  }
  if (a.method == "mc") {
    std::optional<double> wa = a.wA > 0.0 ? std::optional<double>(a.wA) : std::nullopt;
    r = dim_entropy_mc(s, y0, a.n, a.paths, c.seed, geom, threads, wa);
    if (check_wA(s, y0).status == Status::Fails) {
      r.lower_bound.reset();
      r.lower_source = "unknown: (wA) fails at this root";
    }
    if (!a.per_path_out.empty()) {
      EntropyAverage avg = entropy_average_mc(s, y0, a.n, a.paths, c.seed, threads);
      std::ostringstream os;
      os << "path,entropy_average\n" << std::setprecision(17);
      for (std::size_t i = 0; i < avg.per_path.size(); ++i) os << i << ',' << avg.per_path[i] << '\n';
      extra.push_back({a.per_path_out, os.str()});
    }
  } else if (a.method == "exact") {
    r = dim_entropy_exact(s, y0, a.n, geom);
  } else if (a.method == "closed") {
    if (!s.constant_weights.empty() && s.kind != "hata") {
      r = dim_linear(s.constant_weights);
    } else if (s.kind == "hata") {
      r = dim_hata(to_double(parse_rational(s.parameters.at("h_modulus_sq"))),
                   to_double(parse_rational(s.parameters.at("alpha_modulus_sq"))));
    } else if (s.derham && detect_moebius_case(*s.derham)) {
      r.method = "closed_form_moebius";
      r.estimate = 1.0;
      r.upper_bound = 1.0;
      r.lower_bound = 1.0;
      r.note = "mu_phi is equivalent to Lebesgue measure";
    } else {
      throw Error(ErrorKind::Config, "method 'closed' is not applicable to kind '" + s.kind + "'");
    }
  } else if (a.method == "kinney") {
    if (!is_minkowski(s)) throw Error(ErrorKind::Config, "method 'kinney' applies only to the minkowski system");
    r = dim_kinney(static_cast<std::size_t>(a.samples), c.seed, threads);
  } else if (a.method == "fanlau") {
    const DeRhamSystem& d = require_derham(s, "method 'fanlau'");
    SmoothVerdict sv = check_smooth_contracting(d);
    if (!sv.holds) throw Error(ErrorKind::Config, "method 'fanlau' is not applicable: " + sv.reason);
    DensityGrid g = solve_density(d, DensityOptions{a.m, a.tol, 100000});
    r.method = "fan_lau";
    r.estimate = dim_fanlau(d, g);
    r.params["m"] = a.m;
    r.params["tol"] = a.tol;
    r.params["residual"] = g.residual;
    r.params["sweeps"] = g.sweeps;
  } else {
    throw Error(ErrorKind::Config, "unknown method '" + a.method + "' (mc, exact, closed, kinney, fanlau)");
  }
  j["report"] = to_json(r);
  j["geometry"] = geom.name;
  std::vector<Output> outs{{"", dump(j)}};
  for (auto& e : extra) outs.push_back(std::move(e));
  return outs;
}

struct CheckArgs {
  std::string conditions = "A,wA,B,sB";
  std::string state;
  int depth = 12;
  double eps0 = 0.0;
  int l = 0;
  std::string target;
  std::string word;
  double margin = 1e-6;
  double magnitude_cap = 1e6;
};

Output cmd_check(const DrivenSystem& s, const CheckArgs& a) {
  json j = envelope("check", &s);
  State y = a.state.empty() ? s.initial : parse_state(s, a.state);
  CheckOptions opts;
  opts.depth = a.depth;
  opts.margin = a.margin;
  opts.magnitude_cap = a.magnitude_cap;
  std::optional<double> eps0 = a.eps0 > 0.0 ? std::optional<double>(a.eps0) : std::nullopt;
  std::optional<int> l = a.l > 0 ? std::optional<int>(a.l) : std::nullopt;
  j["state"] = s.repr(y);
  json verdicts = json::array();
  for (const std::string& cond : split(a.conditions, ',')) {
    ConditionVerdict v;
    if (cond == "A") {
      v = check_A(s, y, opts);
    } else if (cond == "wA") {
      v = check_wA(s, y, opts);
    } else if (cond == "B") {
      v = check_B(s, y, eps0, l, opts);
    } else if (cond == "sB") {
      v = check_sB(s, y, eps0, l, opts);
    } else if (cond == "multisep2") {
      if (a.target.empty()) throw Error(ErrorKind::Config, "multisep2 needs --target p0,p1,...");
      std::vector<double> p;
      for (const Rational& q : parse_rational_list(a.target)) p.push_back(to_double(q));
      std::optional<Word> w;
      if (!a.word.empty()) w = parse_word(a.word, s.N);
      v = check_multisep2(s, y, p, eps0, w, opts);
    } else {
      throw Error(ErrorKind::Config, "unknown condition '" + cond + "' (A, wA, B, sB, multisep2)");
    }
    verdicts.push_back(to_json(v));
  }
  j["verdicts"] = verdicts;
  return {"", dump(j)};
}

struct SingularityArgs {
  std::string bernoulli;
  long T = 10000;
  int paths = 32;
  std::string state;
  int depth = 12;
  std::string trajectories_out;
  bool no_hellinger = false;
};

std::vector<Output> cmd_singularity(const DrivenSystem& s, const SingularityArgs& a, const Common& c, int threads) {
  json j = envelope("singularity", &s);
  std::vector<Rational> q;
  if (!a.bernoulli.empty()) {
    q = parse_rational_list(a.bernoulli);
  } else {
    for (int i = 0; i < s.N; ++i) q.emplace_back(1, s.N);
  }
  if (static_cast<int>(q.size()) != s.N) throw Error(ErrorKind::Config, "--bernoulli needs " + std::to_string(s.N) + " entries");
  Rational total = 0;
  for (const Rational& v : q) total += v;
  if (total != 1) throw Error(ErrorKind::Domain, "--bernoulli entries must sum to 1 exactly");
  std::vector<double> p;
  for (const Rational& v : q) p.push_back(to_double(v));

  State y0 = a.state.empty() ? s.initial : parse_state(s, a.state);
  CheckOptions opts;
  opts.depth = a.depth;
  SingularityReport rep;
  if (s.derham) {
    rep = classify_derham(*s.derham, q, opts);
  } else if (!s.constant_weights.empty()) {
    rep.comparison = p;
    bool same = true;
    for (std::size_t i = 0; i < p.size(); ++i) same = same && s.constant_weights[i] == p[i];
    rep.verdict = same ? SingularityVerdict::AcCertified : SingularityVerdict::SingularCertified;
    rep.evidence = same ? "identical Bernoulli measures" : "distinct Bernoulli measures are mutually singular";
  } else {
    rep = certify_singular(s, y0, p, opts);
  }
  std::vector<Output> outs;
  if (!a.no_hellinger) {
    HellingerOptions ho;
    ho.T = a.T;
    ho.paths = a.paths;
    ho.seed = c.seed;
    ho.threads = threads;
    HellingerResult h = hellinger_test(s, y0, p, ho);
    if (rep.verdict == SingularityVerdict::Inconclusive) rep.verdict = h.verdict;
    if (!a.trajectories_out.empty()) {
      std::ostringstream os;
      os << "path,n,partial_sum\n" << std::setprecision(17);
      for (std::size_t i = 0; i < h.paths.size(); ++i) {
        for (std::size_t k = 0; k < h.checkpoints.size() && k < h.paths[i].partial_sums.size(); ++k) {
          os << i << ',' << h.checkpoints[k] << ',' << h.paths[i].partial_sums[k] << '\n';
        }
      }
      outs.push_back({a.trajectories_out, os.str()});
    }
    rep.hellinger = std::move(h);
  }
  j["report"] = to_json(rep);
  outs.insert(outs.begin(), Output{"", dump(j)});
  return outs;
}

struct TraceArgs {
  int n = 1000;
  std::uint64_t stream = 0;
  std::string state;
};

Output cmd_trace(const DrivenSystem& s, const TraceArgs& a, const Common& c) {
  State y0 = a.state.empty() ? s.initial : parse_state(s, a.state);
  if (a.n < 1) throw Error(ErrorKind::Config, "--n must be >= 1");
  return {"", trace_csv(s, sample_path(s, y0, a.n, c.seed, a.stream))};
}

struct CurveArgs {
  int depth = 6;
};

Output cmd_curve(const DrivenSystem& s, const CurveArgs& a) {
  const DeRhamSystem& d = require_derham(s, "curve");
  if (a.depth < 0 || std::pow(static_cast<double>(d.N), a.depth) > (1 << 20)) {
    throw Error(ErrorKind::Budget, "curve table with N^depth > 2^20 rows");
  }
  std::ostringstream os;
  os << "x_left,x_right,phi_left,phi_right,mass\n";
  std::vector<int> digits(static_cast<std::size_t>(a.depth), 0);
  while (true) {
    Word w(digits, d.N);
    CurveValues v = curve_eval(d, w);
    NadicInterval I = cylinder_interval(w);
    os << to_string(I.left()) << ',' << to_string(I.right()) << ',' << to_string(v.left) << ',' << to_string(v.right)
       << ',' << to_string(v.mass) << '\n';
    int k = a.depth - 1;
    while (k >= 0 && digits[static_cast<std::size_t>(k)] == d.N - 1) digits[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
    ++digits[static_cast<std::size_t>(k)];
  }
  return {"", os.str()};
}

struct DensityArgs {
  int m = 2049;
  double tol = 1e-10;
  int max_sweeps = 100000;
};

Output cmd_density(const DrivenSystem& s, const DensityArgs& a) {
  const DeRhamSystem& d = require_derham(s, "density");
  DensityGrid g = solve_density(d, DensityOptions{a.m, a.tol, a.max_sweeps});
  std::ostringstream os;
  os << "y,H\n" << std::setprecision(17);
  for (std::size_t k = 0; k < g.nodes.size(); ++k) os << g.nodes[k] << ',' << g.values[k] << '\n';
  return {"", os.str()};
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"schema", kSchemaVersion}, {"error", {{"kind", kind}, {"message", message}}}};
}

void add_common(CLI::App* sub, Common& c, bool needs_system, bool seeded) {
  if (needs_system) sub->add_option("--system", c.system_arg, "system config: JSON file path or inline JSON")->required();
  sub->add_option("--out", c.out_path, "write the primary output here instead of stdout");
  sub->add_option("--manifest", c.manifest_path, "write a run manifest (JSON) here");
  if (seeded) {
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--threads", c.threads, "worker threads (default: GDM_THREADS or 1)");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gdm: measures driven by infinite N-ary trees", "gdm"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common common;
  EvalArgs eval_args;
  DimArgs dim_args;
  CheckArgs check_args;
  SingularityArgs sing_args;
  TraceArgs trace_args;
  CurveArgs curve_args;
  DensityArgs density_args;

  auto* systems = app.add_subcommand("systems", "list built-in system kinds");
  add_common(systems, common, false, false);

  auto* eval = app.add_subcommand("eval", "distribution function table (CSV)");
  add_common(eval, common, true, false);
  eval->add_option("--points", eval_args.points, "dyadic:k | nadic:k | list:t1,t2,...");
  eval->add_option("--depth", eval_args.depth, "digit depth limit for non-N-adic points");

  auto* dim = app.add_subcommand("dim", "dimension estimate (JSON)");
  add_common(dim, common, true, true);
  dim->add_option("--method", dim_args.method, "mc | exact | closed | kinney | fanlau");
  dim->add_option("--n", dim_args.n, "path length");
  dim->add_option("--paths", dim_args.paths, "number of sampled paths");
  dim->add_option("--samples", dim_args.samples, "Kinney samples");
  dim->add_option("--geometry", dim_args.geometry, "interval[:N] | square | gasket | carpet");
  dim->add_option("--wA", dim_args.wA, "(wA) constant for the analytic lower bound");
  dim->add_option("--m", dim_args.m, "density grid nodes (fanlau)");
  dim->add_option("--tol", dim_args.tol, "density tolerance (fanlau)");
  dim->add_option("--y", dim_args.state, "initial state");
  dim->add_option("--per-path-out", dim_args.per_path_out, "CSV of per-path entropy averages");

  auto* check = app.add_subcommand("check", "condition verdicts (JSON)");
  add_common(check, common, true, false);
  check->add_option("--conditions", check_args.conditions, "comma list of A, wA, B, sB, multisep2");
  check->add_option("--y", check_args.state, "root state");
  check->add_option("--depth", check_args.depth, "orbit depth");
  check->add_option("--eps0", check_args.eps0, "fixed box half-width (default: searched)");
  check->add_option("--l", check_args.l, "fixed word length for B/sB (default: searched)");
  check->add_option("--target", check_args.target, "multisep2 box centre p0,p1,...");
  check->add_option("--word", check_args.word, "multisep2 word");
  check->add_option("--margin", check_args.margin, "numerical margin");
  check->add_option("--magnitude-cap", check_args.magnitude_cap, "orbit magnitude cap");

  auto* sing = app.add_subcommand("singularity", "singularity classification (JSON)");
  add_common(sing, common, true, true);
  sing->add_option("--bernoulli", sing_args.bernoulli, "comparison vector p0,p1,... (default uniform)");
  sing->add_option("--T", sing_args.T, "Hellinger horizon");
  sing->add_option("--paths", sing_args.paths, "Hellinger paths");
  sing->add_option("--y", sing_args.state, "initial state");
  sing->add_option("--depth", sing_args.depth, "orbit depth for certification");
  sing->add_option("--trajectories-out", sing_args.trajectories_out, "CSV of partial-sum trajectories");
  sing->add_flag("--no-hellinger", sing_args.no_hellinger, "skip the heuristic test");

  auto* trace = app.add_subcommand("trace", "sampled path trace (CSV)");
  add_common(trace, common, true, true);
  trace->add_option("--n", trace_args.n, "path length");
  trace->add_option("--stream", trace_args.stream, "stream index under the seed");
  trace->add_option("--y", trace_args.state, "initial state");

  auto* curve = app.add_subcommand("curve", "de Rham curve table (CSV)");
  add_common(curve, common, true, false);
  curve->add_option("--depth", curve_args.depth, "word length");

  auto* density = app.add_subcommand("density", "transfer-operator density (CSV)");
  add_common(density, common, true, false);
  density->add_option("--m", density_args.m, "grid nodes (odd)");
  density->add_option("--tol", density_args.tol, "sup-change tolerance");
  density->add_option("--max-sweeps", density_args.max_sweeps, "iteration budget");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()).dump() << '\n';
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    std::unique_ptr<DrivenSystem> system;
    std::string cfg_text;
    if (command != "systems") {
      cfg_text = config_text(common.system_arg);
      system = std::make_unique<DrivenSystem>(make_system_from_text(cfg_text));
    }
    int threads = resolve_threads(common.threads);

    std::vector<Output> outputs;
    if (command == "systems") {
      outputs.push_back(cmd_systems());
    } else if (command == "eval") {
      outputs.push_back(cmd_eval(*system, eval_args));
    } else if (command == "dim") {
      outputs = cmd_dim(*system, dim_args, common, threads);
    } else if (command == "check") {
      outputs.push_back(cmd_check(*system, check_args));
    } else if (command == "singularity") {
      outputs = cmd_singularity(*system, sing_args, common, threads);
    } else if (command == "trace") {
      outputs.push_back(cmd_trace(*system, trace_args, common));
    } else if (command == "curve") {
      outputs.push_back(cmd_curve(*system, curve_args));
    } else if (command == "density") {
      outputs.push_back(cmd_density(*system, density_args));
    }
    outputs.front().path = common.out_path;

    // Everything is computed before anything is written.
    json manifest;
    manifest["schema"] = kSchemaVersion;
    manifest["command"] = command;
    manifest["tool_version"] = kToolVersion;
    if (system) {
      manifest["config_path"] = common.system_arg.find('{') == std::string::npos ? common.system_arg : "<inline>";
      manifest["config_sha256"] = sha256_hex(cfg_text);
    }
    manifest["seed"] = common.seed;
    json params = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty()) continue;
      std::string name = "--" + opt->get_lnames().front();
      if (name == "--help" || name == "--out" || name == "--manifest" || name == "--threads" ||
          name == "--system" || name == "--seed") {
        continue;
      }
      std::string value = opt->count() ? CLI::detail::join(opt->results()) : opt->get_default_str();
      params[name.substr(name.find_first_not_of('-'))] = value;
    }
    manifest["parameters"] = params;
    json digests = json::array();
    for (const Output& o : outputs) digests.push_back({{"path", o.path.empty() ? "-" : o.path}, {"sha256", sha256_hex(o.content)}});
    manifest["outputs"] = digests;

    for (const Output& o : outputs) {
      if (o.path.empty()) {
        out << o.content;
      } else {
        write_atomic(o.path, o.content);
      }
    }
    if (!common.manifest_path.empty()) write_atomic(common.manifest_path, dump(manifest));
    return 0;
  } catch (const Error& e) {
    err << error_json(to_string(e.kind()), e.what()).dump() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    err << error_json("config", e.what()).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << error_json("internal", e.what()).dump() << '\n';
    return 70;
  }
}

}  // namespace gdm
