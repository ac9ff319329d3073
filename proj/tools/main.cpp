// Command-line front end: simulate | tune | fit | eval | compare.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pcrp/datasets.hpp"
#include "pcrp/metrics.hpp"
#include "pcrp/partition.hpp"
#include "pcrp/rng.hpp"
#include "pcrp/sampler.hpp"
#include "pcrp/tuning.hpp"

using nlohmann::json;
using namespace pcrp;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// All file outputs go through here: write to a sibling temp file, then
// rename into place so readers never see a partial file.
void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void write_dataset_atomic(const Dataset& d, const std::string& path) {
  const std::string tmp = path + ".tmp";
  write_csv(d, tmp);
  std::filesystem::rename(tmp, path);
}

MixtureSpec spec_from_json(const json& j) {
  MixtureSpec s;
  s.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& m : j.at("means")) {
    const auto v = m.get<std::vector<double>>();
    s.means.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
  }
  for (const auto& c : j.at("covariances")) {
    const auto rows = c.get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd cov(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < rows[i].size(); ++k) cov(i, k) = rows[i][k];
    s.covariances.push_back(cov);
  }
  s.validate();
  return s;
}

MixtureSpec preset_spec(const std::string& name) {
  if (name == "sim1") return sim1_spec();
  if (name == "sim2") return sim2_spec();
  throw std::runtime_error("unknown simulation preset '" + name + "' (use sim1 or sim2)");
}

// Hyperparameter overrides layered on top of the data-driven default prior.
struct PriorFlags {
  std::optional<double> kappa0, nu0, psi0_scale;
  std::optional<std::vector<double>> mu0;

  NiwParams resolve(const Eigen::MatrixXd& x) const {
    NiwParams p = NiwParams::default_for(x);
    if (kappa0) p.kappa0 = *kappa0;
    if (nu0) p.nu0 = *nu0;
    if (psi0_scale) p.psi0 *= *psi0_scale;
    if (mu0) {
      if (static_cast<int>(mu0->size()) != p.dim())
        throw std::runtime_error("--mu0 needs " + std::to_string(p.dim()) + " values");
      p.mu0 = Eigen::Map<const Eigen::VectorXd>(mu0->data(), mu0->size());
    }
    p.validate();
    return p;
  }
};

ProcessParams make_process(const std::string& kind, double alpha, double power) {
  if (kind == "crp") return ProcessParams::crp(alpha);
  if (kind == "pcrp") return ProcessParams::pcrp(alpha, power);
  if (kind == "gcrp")
    // the CLI exercises the generic-weight path with the power family
    return ProcessParams::gcrp(alpha, [power](double n) { return std::pow(n, power); });
  throw std::runtime_error("unknown process '" + kind + "'");
}

std::string curve_csv(const CvCurve& c) {
  std::string out = "r,loss,is_chosen\n";
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    out += fmt(c.grid[i]) + "," + fmt(c.losses[i]) + "," +
           (static_cast<int>(i) == c.chosen_index ? "1" : "0") + "\n";
  }
  return out;
}

std::string trace_csv(const Chain& chain) {
  std::string out = "iteration,k\n";
  for (std::size_t t = 0; t < chain.k_trace.size(); ++t)
    out += std::to_string(t + 1) + "," + std::to_string(chain.k_trace[t]) + "\n";
  return out;
}

// Retained samples, one row per sample, one column per item.
std::string samples_csv(const Chain& chain) {
  std::string out;
  const std::size_t n = chain.samples.empty() ? 0 : chain.samples[0].size();
  for (std::size_t j = 0; j < n; ++j) out += (j ? ",z" : "z") + std::to_string(j + 1);
  out += "\n";
  for (const auto& s : chain.samples) {
    for (std::size_t j = 0; j < s.size(); ++j)
      out += (j ? "," : "") + std::to_string(s[j]);
    out += "\n";
  }
  return out;
}

std::vector<std::vector<int>> read_samples_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ":1: empty samples file");
  std::vector<std::vector<int>> samples;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<int> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stoi(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": bad label '" + cell + "'");
      }
    }
    if (!samples.empty() && row.size() != samples[0].size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": ragged row");
    samples.push_back(std::move(row));
  }
  if (samples.empty()) throw std::runtime_error(path + ": no samples");
  return samples;
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : "na"; }

std::string table_row_csv(const std::string& method, const ChainSummary& s) {
  return method + "," + opt_fmt(s.mean_nmi) + "," + opt_fmt(s.se_nmi) + "," +
         opt_fmt(s.mean_vi) + "," + opt_fmt(s.se_vi) + "," + fmt(s.mean_k) + "," +
         fmt(s.se_k) + "," + std::to_string(s.k_max) + "\n";
}

std::string table_text(const std::vector<std::pair<std::string, ChainSummary>>& rows) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s %8s %7s %8s %7s %7s %7s %6s\n", "method", "NMI",
                "SE", "VI", "SE", "K", "SE", "Kmax");
  out += buf;
  for (const auto& [m, s] : rows) {
    auto num = [](const std::optional<double>& v) {
      char b[32];
      if (!v) return std::string("na");
      std::snprintf(b, sizeof b, "%.3f", *v);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "%-12s %8s %7s %8s %7s %7.2f %7.3f %6d\n", m.c_str(),
                  num(s.mean_nmi).c_str(), num(s.se_nmi).c_str(), num(s.mean_vi).c_str(),
                  num(s.se_vi).c_str(), s.mean_k, s.se_k, s.k_max);
    out += buf;
  }
  return out;
}

std::string k_dist_csv(const std::map<int, double>& dist) {
  std::string out = "k,probability\n";
  for (const auto& [k, p] : dist) out += std::to_string(k) + "," + fmt(p) + "\n";
  return out;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& preset, const std::string& spec_file, int n,
                 std::uint64_t seed, const std::string& out) {
  MixtureSpec spec;
  if (!spec_file.empty()) {
    std::ifstream in(spec_file);
    if (!in) throw std::runtime_error("cannot read " + spec_file);
    spec = spec_from_json(json::parse(in));
  } else {
    spec = preset_spec(preset);
  }
  Dataset d = generate(spec, n, seed);
  write_dataset_atomic(d, out);
  std::printf("wrote %d x %d dataset with labels to %s\n", d.n(), d.dim(), out.c_str());
  return 0;
}

// -------------------------------------------------------------------- tune

struct TuneFlags {
  double alpha = 1.0;
  double grid_start = 1.01, grid_step = 0.0, grid_max = 3.0;
  double jump_factor = 1.5;
  int iterations = 600, burn_in = 300, thin = 3;
};

CvCurve run_tune(const Eigen::MatrixXd& x, const PriorFlags& prior_flags,
                 const TuneFlags& t, std::uint64_t seed) {
  std::vector<double> grid;
  if (t.grid_step > 0.0) {
    grid = GridSpec{t.grid_start, t.grid_step, t.grid_max}.points();
  } else {
    for (double r : default_grid())
      if (r >= t.grid_start && r <= t.grid_max) grid.push_back(r);
  }
  SamplerConfig c;
  c.iterations = t.iterations;
  c.burn_in = t.burn_in;
  c.thin = t.thin;
  c.seed = seed;
  return tune_power(x, grid, prior_flags.resolve(x), t.alpha, c, t.jump_factor);
}

int cmd_tune(const std::string& data_path, const PriorFlags& prior_flags,
             const TuneFlags& t, std::uint64_t seed, const std::string& out) {
  const Dataset d = read_csv(data_path);
  const CvCurve curve = run_tune(d.x, prior_flags, t, seed);
  if (!out.empty()) write_atomic(out, curve_csv(curve));
  if (curve.inflection_found) {
    std::printf("chosen r: %s\n", fmt(curve.chosen_r).c_str());
    return 0;
  }
  std::printf("no inflection found; largest scanned r: %s\n", fmt(curve.chosen_r).c_str());
  return 3;
}

// --------------------------------------------------------------------- fit

struct FitResult {
  Chain chain;
  ChainSummary summary;
};

int cmd_fit(const Dataset& d, const std::string& process, double alpha, double power,
            const PriorFlags& prior_flags, SamplerConfig config, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const NiwParams prior = prior_flags.resolve(d.x);
  const ProcessParams params = make_process(process, alpha, power);
  const Chain chain = run_chain(d.x, params, prior, config);
  const ChainSummary s = summarize(chain, d.labels ? &*d.labels : nullptr);

  const std::filesystem::path dir(out_dir);
  write_atomic((dir / "trace.csv").string(), trace_csv(chain));
  write_atomic((dir / "samples.csv").string(), samples_csv(chain));

  json j;
  j["n"] = d.n();
  j["dim"] = d.dim();
  j["process"] = process;
  j["alpha"] = alpha;
  if (process != "crp") j["power"] = power;
  j["iterations"] = config.iterations;
  j["burn_in"] = config.burn_in;
  j["thin"] = config.thin;
  j["seed"] = config.seed;
  j["mean_k"] = s.mean_k;
  j["se_k"] = s.se_k;
  j["k_max"] = s.k_max;
  if (s.mean_nmi) {
    j["mean_nmi"] = *s.mean_nmi;
    j["se_nmi"] = *s.se_nmi;
    j["mean_vi"] = *s.mean_vi;
    j["se_vi"] = *s.se_vi;
  }
  write_atomic((dir / "summary.json").string(), j.dump(2) + "\n");
  std::printf("retained %zu samples; mean K %.3f (max %d)\n", chain.samples.size(),
              s.mean_k, s.k_max);
  return 0;
}

// -------------------------------------------------------------------- eval

ChainSummary summarize_samples(const std::vector<std::vector<int>>& samples,
                               const std::vector<int>* truth) {
  Chain chain;
  chain.samples = samples;
  for (const auto& s : samples)
    chain.k_trace.push_back(*std::max_element(s.begin(), s.end()) + 1);
  return summarize(chain, truth);
}

std::vector<int> read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<int> ks;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    ks.push_back(std::stoi(line.substr(comma + 1)));
  }
  return ks;
}

int cmd_eval(const std::string& samples_path, const std::string& truth_path,
             const std::string& trace_path, const std::string& out) {
  const auto samples = read_samples_csv(samples_path);
  const Dataset truth = read_csv(truth_path);
  if (!truth.labels)
    throw std::runtime_error(truth_path + ": no label column; cannot evaluate");
  if (truth.labels->size() != samples[0].size())
    throw std::runtime_error("samples have " + std::to_string(samples[0].size()) +
                             " items but truth has " + std::to_string(truth.labels->size()));
  ChainSummary s;
  if (!trace_path.empty()) {
    // K_max over the full sweep trace, burn-in included
    Chain chain;
    chain.samples = samples;
    chain.k_trace = read_trace_csv(trace_path);
    s = summarize(chain, &*truth.labels);
  } else {
    s = summarize_samples(samples, &*truth.labels);
  }
  const std::string header = "method,nmi,nmi_se,vi,vi_se,k,k_se,k_max\n";
  if (!out.empty()) write_atomic(out, header + table_row_csv("samples", s));
  std::fputs(table_text({{"samples", s}}).c_str(), stdout);
  return 0;
}

// ----------------------------------------------------------------- compare

struct CompareConfig {
  std::string data, preset, out;
  int n = 300;
  std::optional<std::uint64_t> seed;
  double alpha = 1.0;
  std::optional<double> power;  // absent -> tune
  std::optional<int> true_k;    // needed for crp-oracle
  std::vector<std::string> methods = {"crp", "pcrp"};
  SamplerConfig sampler;
  PriorFlags prior;
  TuneFlags tune;
};

CompareConfig parse_compare_config(const std::string& path) {
  CompareConfig c;
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  const json j = json::parse(in);
  auto get = [&](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).template get<std::decay_t<decltype(target)>>();
  };
  get("data", c.data);
  get("preset", c.preset);
  get("out", c.out);
  get("n", c.n);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  get("alpha", c.alpha);
  if (j.contains("power")) c.power = j.at("power").get<double>();
  if (j.contains("true_k")) c.true_k = j.at("true_k").get<int>();
  get("methods", c.methods);
  get("iterations", c.sampler.iterations);
  get("burn_in", c.sampler.burn_in);
  get("thin", c.sampler.thin);
  if (j.contains("kappa0")) c.prior.kappa0 = j.at("kappa0").get<double>();
  if (j.contains("nu0")) c.prior.nu0 = j.at("nu0").get<double>();
  if (j.contains("psi0_scale")) c.prior.psi0_scale = j.at("psi0_scale").get<double>();
  if (j.contains("mu0")) c.prior.mu0 = j.at("mu0").get<std::vector<double>>();
  get("grid_start", c.tune.grid_start);
  get("grid_step", c.tune.grid_step);
  get("grid_max", c.tune.grid_max);
  get("jump_factor", c.tune.jump_factor);
  get("tune_iterations", c.tune.iterations);
  get("tune_burn_in", c.tune.burn_in);
  get("tune_thin", c.tune.thin);
  return c;
}

int cmd_compare(const CompareConfig& cfg) {
  if (!cfg.seed) throw std::runtime_error("compare needs an explicit seed");
  if (cfg.out.empty()) throw std::runtime_error("compare needs --out");
  if (cfg.data.empty() && cfg.preset.empty())
    throw std::runtime_error("compare needs --data or --preset");
  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path dir(cfg.out);

  // Assemble the evaluation dataset and, when tuning is needed, a training
  // set that is disjoint from it where the source allows.
  Dataset eval_data;
  std::optional<Dataset> train;
  if (cfg.preset == "sim1" || cfg.preset == "sim2") {
    const MixtureSpec spec = preset_spec(cfg.preset);
    eval_data = generate(spec, cfg.n, *cfg.seed);
    train = generate(spec, 200, *cfg.seed ^ 0xA5A5A5A5ULL);
  } else if (cfg.preset == "oldfaithful" || !cfg.data.empty()) {
    const std::string path =
        !cfg.data.empty() ? cfg.data : std::string("data/oldfaithful.csv");
    Dataset full = read_csv(path);
    if (cfg.preset == "oldfaithful") {
      // seeded shuffle, first 100 rows tune, the rest evaluate
      std::vector<int> order(full.n());
      std::iota(order.begin(), order.end(), 0);
      Rng rng(*cfg.seed);
      rng.shuffle(order);
      auto take = [&](int begin, int end) {
        Dataset part;
        part.x.resize(end - begin, full.dim());
        if (full.labels) part.labels = std::vector<int>(end - begin);
        for (int i = begin; i < end; ++i) {
          part.x.row(i - begin) = full.x.row(order[i]);
          if (full.labels) (*part.labels)[i - begin] = (*full.labels)[order[i]];
        }
        return part;
      };
      const int split = std::min(100, full.n());
      train = take(0, split);
      eval_data = take(split, full.n());
    } else {
      eval_data = full;
      train = full;
    }
  }
  write_dataset_atomic(eval_data, (dir / "data.csv").string());

  json out_summary;
  bool uses_pcrp = false, uses_oracle = false;
  for (const auto& m : cfg.methods) {
    if (m == "pcrp") uses_pcrp = true;
    else if (m == "crp-oracle") uses_oracle = true;
    else if (m != "crp") throw std::runtime_error("unknown method '" + m + "'");
  }
  if (uses_oracle && !cfg.true_k)
    throw std::runtime_error("crp-oracle requires true_k");

  double power = cfg.power.value_or(0.0);
  if (uses_pcrp && !cfg.power) {
    const CvCurve curve = run_tune(train->x, cfg.prior, cfg.tune, *cfg.seed);
    write_atomic((dir / "cv_curve.csv").string(), curve_csv(curve));
    power = curve.chosen_r;
    out_summary["tuned_power"] = power;
    out_summary["inflection_found"] = curve.inflection_found;
    if (!curve.inflection_found)
      std::fprintf(stderr, "warning: no inflection on the tuning grid; using r=%s\n",
                   fmt(power).c_str());
    std::printf("tuned power r = %s\n", fmt(power).c_str());
  }

  // One chain per method, all from the same seed and data so rows differ
  // only in the seating rule.
  const NiwParams prior = cfg.prior.resolve(eval_data.x);
  auto fit_method = [&](const std::string& m) {
    ProcessParams params =
        m == "crp"        ? ProcessParams::crp(cfg.alpha)
        : m == "crp-oracle" ? ProcessParams::crp(oracle_alpha(*cfg.true_k, eval_data.n()))
                            : ProcessParams::pcrp(cfg.alpha, power);
    SamplerConfig sc = cfg.sampler;
    sc.seed = *cfg.seed;
    FitResult r;
    r.chain = run_chain(eval_data.x, params, prior, sc);
    r.summary = summarize(r.chain, eval_data.labels ? &*eval_data.labels : nullptr);
    return std::make_pair(params, r);
  };
  std::vector<std::future<std::pair<ProcessParams, FitResult>>> futures;
  for (const auto& m : cfg.methods)
    futures.push_back(std::async(std::launch::async, fit_method, m));

  std::string csv = "method,nmi,nmi_se,vi,vi_se,k,k_se,k_max\n";
  std::vector<std::pair<std::string, ChainSummary>> rows;
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    const auto& m = cfg.methods[i];
    auto [params, r] = futures[i].get();
    csv += table_row_csv(m, r.summary);
    rows.emplace_back(m, r.summary);
    write_atomic((dir / ("k_dist_" + m + ".csv")).string(),
                 k_dist_csv(posterior_k_distribution(r.chain)));
    write_atomic((dir / ("trace_" + m + ".csv")).string(), trace_csv(r.chain));
    write_atomic((dir / ("samples_" + m + ".csv")).string(), samples_csv(r.chain));

    // point estimate: highest-joint-probability retained sample
    const int map_idx = map_sample_index(r.chain, eval_data.x, params, prior);
    Dataset point = eval_data;
    point.labels = r.chain.samples[map_idx];
    write_dataset_atomic(point, (dir / ("point_estimate_" + m + ".csv")).string());

    json mj;
    mj["alpha"] = params.alpha;
    if (m == "pcrp") mj["power"] = power;
    mj["mean_k"] = r.summary.mean_k;
    mj["se_k"] = r.summary.se_k;
    mj["k_max"] = r.summary.k_max;
    const auto& map_labels = *point.labels;
    mj["map_k"] = *std::max_element(map_labels.begin(), map_labels.end()) + 1;
    if (eval_data.labels) {
      mj["mean_nmi"] = *r.summary.mean_nmi;
      mj["se_nmi"] = *r.summary.se_nmi;
      mj["mean_vi"] = *r.summary.mean_vi;
      mj["se_vi"] = *r.summary.se_vi;
      mj["map_nmi"] = nmi(map_labels, *eval_data.labels);
      mj["map_vi"] = vi(map_labels, *eval_data.labels);
    }
    out_summary[m] = mj;
  }
  write_atomic((dir / "table.csv").string(), csv);
  const std::string text = table_text(rows);
  write_atomic((dir / "table.txt").string(), text);
  write_atomic((dir / "summary.json").string(), out_summary.dump(2) + "\n");
  std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chinese-restaurant-process clustering toolkit (CRP / power-weighted CRP)"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a labeled synthetic dataset");
  std::string sim_preset, sim_spec_file, sim_out;
  int sim_n = 300;
  std::uint64_t sim_seed = 0;
  sim->add_option("--preset", sim_preset, "sim1 | sim2");
  sim->add_option("--spec", sim_spec_file, "JSON mixture spec file");
  sim->add_option("--n", sim_n, "sample size")->required();
  sim->add_option("--seed", sim_seed, "RNG seed")->required();
  sim->add_option("--out", sim_out, "output CSV path")->required();

  // shared flag bundles
  auto add_prior_flags = [](CLI::App* cmd, PriorFlags& p) {
    cmd->add_option("--kappa0", [&p](const auto& v) { p.kappa0 = std::stod(v[0]); return true; },
                    "prior mean-confidence override");
    cmd->add_option("--nu0", [&p](const auto& v) { p.nu0 = std::stod(v[0]); return true; },
                    "prior degrees-of-freedom override");
    cmd->add_option("--psi0-scale",
                    [&p](const auto& v) { p.psi0_scale = std::stod(v[0]); return true; },
                    "multiplier on the data-driven scale matrix");
    cmd->add_option("--mu0",
                    [&p](const auto& v) {
                      std::vector<double> vals;
                      std::stringstream ss(v[0]);
                      std::string cell;
                      while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
                      p.mu0 = vals;
                      return true;
                    },
                    "prior mean, comma separated");
  };
  auto add_grid_flags = [](CLI::App* cmd, TuneFlags& t) {
    cmd->add_option("--alpha", t.alpha, "concentration");
    cmd->add_option("--grid-start", t.grid_start, "first power on the grid");
    cmd->add_option("--grid-step", t.grid_step, "grid spacing (0 = built-in grid)");
    cmd->add_option("--grid-max", t.grid_max, "largest power on the grid");
    cmd->add_option("--jump-factor", t.jump_factor, "loss blow-up threshold");
    cmd->add_option("--iterations", t.iterations, "sweeps per grid point");
    cmd->add_option("--burn-in", t.burn_in, "burn-in per grid point");
    cmd->add_option("--thin", t.thin, "thinning per grid point");
  };

  // tune
  auto* tune = app.add_subcommand("tune", "cross-validate the cluster-size power r");
  std::string tune_data, tune_out;
  std::uint64_t tune_seed = 0;
  TuneFlags tune_flags;
  PriorFlags tune_prior;
  tune->add_option("--data", tune_data, "training CSV")->required();
  tune->add_option("--seed", tune_seed, "RNG seed")->required();
  tune->add_option("--out", tune_out, "CV-curve CSV path");
  add_grid_flags(tune, tune_flags);
  add_prior_flags(tune, tune_prior);

  // fit
  auto* fit = app.add_subcommand("fit", "run one collapsed Gibbs chain");
  std::string fit_data, fit_preset, fit_process = "crp", fit_out;
  int fit_n = 300;
  double fit_alpha = 1.0, fit_power = 1.0;
  std::uint64_t fit_seed = 0;
  SamplerConfig fit_config;
  PriorFlags fit_prior;
  fit->add_option("--data", fit_data, "data CSV");
  fit->add_option("--preset", fit_preset, "sim1 | sim2 (generated with --n, --seed)");
  fit->add_option("--n", fit_n, "preset sample size");
  fit->add_option("--process", fit_process, "crp | pcrp | gcrp");
  fit->add_option("--alpha", fit_alpha, "concentration");
  fit->add_option("--power", fit_power, "cluster-size power (pcrp/gcrp)");
  fit->add_option("--iterations", fit_config.iterations, "total sweeps");
  fit->add_option("--burn-in", fit_config.burn_in, "discarded sweeps");
  fit->add_option("--thin", fit_config.thin, "keep every thin-th sweep");
  fit->add_option("--seed", fit_seed, "RNG seed")->required();
  fit->add_option("--out", fit_out, "output directory")->required();
  add_prior_flags(fit, fit_prior);

  // eval
  auto* eval = app.add_subcommand("eval", "score retained samples against true labels");
  std::string eval_samples, eval_truth, eval_trace, eval_out;
  eval->add_option("--samples", eval_samples, "retained-samples CSV from fit")->required();
  eval->add_option("--data", eval_truth, "labeled CSV with the truth")->required();
  eval->add_option("--trace", eval_trace, "trace CSV from fit (for full-trace K max)");
  eval->add_option("--out", eval_out, "summary CSV path");

  // compare
  auto* cmp = app.add_subcommand("compare", "tune, fit and tabulate several methods");
  std::string cmp_config_path, cmp_data, cmp_preset, cmp_out, cmp_methods;
  CompareConfig overrides;
  bool has_n = false, has_alpha = false, has_power = false, has_true_k = false;
  int cmp_n = 0, cmp_true_k = 0;
  double cmp_alpha = 0.0, cmp_power = 0.0;
  std::uint64_t cmp_seed = 0;
  bool has_seed = false;
  cmp->add_option("--config", cmp_config_path, "JSON run configuration");
  cmp->add_option("--data", cmp_data, "data CSV");
  cmp->add_option("--preset", cmp_preset, "sim1 | sim2 | oldfaithful");
  cmp->add_option("--n", cmp_n, "preset sample size")->each([&](const std::string&) { has_n = true; });
  cmp->add_option("--seed", cmp_seed, "RNG seed")->each([&](const std::string&) { has_seed = true; });
  cmp->add_option("--alpha", cmp_alpha, "concentration")->each([&](const std::string&) { has_alpha = true; });
  cmp->add_option("--power", cmp_power, "fixed power (skip tuning)")->each([&](const std::string&) { has_power = true; });
  cmp->add_option("--true-k", cmp_true_k, "ground-truth cluster count")->each([&](const std::string&) { has_true_k = true; });
  cmp->add_option("--methods", cmp_methods, "comma list from {crp,crp-oracle,pcrp}");
  cmp->add_option("--out", cmp_out, "output directory");
  int cmp_iter = 0, cmp_burn = -1, cmp_thin = 0;
  cmp->add_option("--iterations", cmp_iter, "total sweeps");
  cmp->add_option("--burn-in", cmp_burn, "discarded sweeps");
  cmp->add_option("--thin", cmp_thin, "keep every thin-th sweep");
  TuneFlags cmp_tune_defaults;
  cmp->add_option("--grid-start", cmp_tune_defaults.grid_start, "first power on the grid")
      ->each([&](const std::string&) { overrides.tune.grid_start = cmp_tune_defaults.grid_start; });
  cmp->add_option("--grid-step", cmp_tune_defaults.grid_step, "grid spacing")
      ->each([&](const std::string&) { overrides.tune.grid_step = cmp_tune_defaults.grid_step; });
  cmp->add_option("--grid-max", cmp_tune_defaults.grid_max, "largest power")
      ->each([&](const std::string&) { overrides.tune.grid_max = cmp_tune_defaults.grid_max; });
  cmp->add_option("--jump-factor", cmp_tune_defaults.jump_factor, "loss blow-up threshold")
      ->each([&](const std::string&) { overrides.tune.jump_factor = cmp_tune_defaults.jump_factor; });
  PriorFlags cmp_prior;
  add_prior_flags(cmp, cmp_prior);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      if (sim_preset.empty() == sim_spec_file.empty())
        throw std::runtime_error("simulate needs exactly one of --preset / --spec");
      return cmd_simulate(sim_preset, sim_spec_file, sim_n, sim_seed, sim_out);
    }
    if (tune->parsed()) return cmd_tune(tune_data, tune_prior, tune_flags, tune_seed, tune_out);
    if (fit->parsed()) {
      Dataset d;
      if (!fit_data.empty()) {
        d = read_csv(fit_data);
      } else if (!fit_preset.empty()) {
        d = generate(preset_spec(fit_preset), fit_n, fit_seed);
      } else {
        throw std::runtime_error("fit needs --data or --preset");
      }
      fit_config.seed = fit_seed;
      return cmd_fit(d, fit_process, fit_alpha, fit_power, fit_prior, fit_config, fit_out);
    }
    if (eval->parsed()) return cmd_eval(eval_samples, eval_truth, eval_trace, eval_out);
    if (cmp->parsed()) {
      CompareConfig cfg = parse_compare_config(cmp_config_path);
      if (!cmp_data.empty()) cfg.data = cmp_data;
      if (!cmp_preset.empty()) cfg.preset = cmp_preset;
      if (!cmp_out.empty()) cfg.out = cmp_out;
      if (has_n) cfg.n = cmp_n;
      if (has_seed) cfg.seed = cmp_seed;
      if (has_alpha) cfg.alpha = cmp_alpha;
      if (has_power) cfg.power = cmp_power;
      if (has_true_k) cfg.true_k = cmp_true_k;
      if (!cmp_methods.empty()) {
        cfg.methods.clear();
        std::stringstream ss(cmp_methods);
        std::string m;
        while (std::getline(ss, m, ',')) cfg.methods.push_back(m);
      }
      if (cmp_iter > 0) cfg.sampler.iterations = cmp_iter;
      if (cmp_burn >= 0) cfg.sampler.burn_in = cmp_burn;
      if (cmp_thin > 0) cfg.sampler.thin = cmp_thin;
      if (overrides.tune.grid_start != 1.01) cfg.tune.grid_start = overrides.tune.grid_start;
      if (overrides.tune.grid_step != 0.0) cfg.tune.grid_step = overrides.tune.grid_step;
      if (overrides.tune.grid_max != 3.0) cfg.tune.grid_max = overrides.tune.grid_max;
      if (overrides.tune.jump_factor != 1.5) cfg.tune.jump_factor = overrides.tune.jump_factor;
      if (cmp_prior.kappa0) cfg.prior.kappa0 = cmp_prior.kappa0;
      if (cmp_prior.nu0) cfg.prior.nu0 = cmp_prior.nu0;
      if (cmp_prior.psi0_scale) cfg.prior.psi0_scale = cmp_prior.psi0_scale;
      if (cmp_prior.mu0) cfg.prior.mu0 = cmp_prior.mu0;
      return cmd_compare(cfg);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
