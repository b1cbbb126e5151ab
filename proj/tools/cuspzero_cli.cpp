// Command-line driver over the C API: eigenform caches, censuses, model profiles, comparisons.

#include "cuspzero/cuspzero.h"

#include <CLI11.hpp>

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0, kExitPartial = 1, kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string weights;
  int precision_bits = 192;
  int terms = 0;
  double delta = 0.2;
  std::string segments = "delta1,delta2,delta3";
  std::string Y = "3sqrtk";
  int trials = 0;
  uint64_t seed = 1;
  std::string cache_dir = "cache";
  std::string out = "out";
  bool force = false;
  int jobs = 1;
  double tol = 1e-10;
  bool witnesses = false;
  int points = 200;
  std::string range;
  int lmax = 10;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

long to_long(const std::string& s) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: " + s);
  }
  if (pos != s.size()) throw ConfigError("not an integer: " + s);
  return v;
}

double to_double(const std::string& s) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a number: " + s);
  }
  if (pos != s.size() || !std::isfinite(v)) throw ConfigError("not a number: " + s);
  return v;
}

// "12,16,20..40,100..300:2"
std::vector<int> parse_weights(const std::string& spec, bool allow_large) {
  std::vector<int> out;
  for (const auto& item : split(spec, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<int>(to_long(item)));
      continue;
    }
    long step = 2;
    std::string hi_s = item.substr(dots + 2);
    if (auto colon = hi_s.find(':'); colon != std::string::npos) {
      step = to_long(hi_s.substr(colon + 1));
      hi_s = hi_s.substr(0, colon);
    }
    const long lo = to_long(item.substr(0, dots)), hi = to_long(hi_s);
    if (step <= 0 || hi < lo) throw ConfigError("bad weight range: " + item);
    for (long k = lo; k <= hi; k += step) out.push_back(static_cast<int>(k));
  }
  if (out.empty()) throw ConfigError("no weights given");
  for (int k : out) {
    if (k < 12 || k % 2) throw ConfigError("weights must be even and at least 12: " + std::to_string(k));
    if (!allow_large && k > 5000) throw ConfigError("weight too large for eigenform computation: " + std::to_string(k));
  }
  return out;
}

// Numbers, or "<c>sqrtk" meaning c * sqrt(k).
std::vector<double> parse_Y(const std::string& spec, int k) {
  std::vector<double> out;
  for (const auto& item : split(spec, ',')) {
    const auto pos = item.find("sqrtk");
    if (pos != std::string::npos) {
      if (pos + 5 != item.size()) throw ConfigError("bad Y value: " + item);
      const double c = pos == 0 ? 1.0 : to_double(item.substr(0, pos));
      out.push_back(c * std::sqrt(static_cast<double>(k)));
    } else {
      out.push_back(to_double(item));
    }
  }
  for (double y : out)
    if (!(y >= 1)) throw ConfigError("Y values must be at least 1");
  return out;
}

std::vector<cz_segment> parse_segments(const std::string& spec) {
  std::vector<cz_segment> out;
  for (const auto& s : split(spec, ',')) {
    if (s == "delta1" || s == "1") out.push_back(CZ_DELTA1);
    else if (s == "delta2" || s == "2") out.push_back(CZ_DELTA2);
    else if (s == "delta3" || s == "3") out.push_back(CZ_DELTA3);
    else throw ConfigError("unknown segment: " + s);
  }
  if (out.empty()) throw ConfigError("no segments given");
  return out;
}

const char* seg_name(cz_segment s) { return s == CZ_DELTA1 ? "delta1" : s == CZ_DELTA2 ? "delta2" : "delta3"; }

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void validate(const RunConfig& c) {
  if (c.precision_bits < 64) throw ConfigError("--precision-bits must be at least 64");
  if (c.terms < 0) throw ConfigError("--terms must be nonnegative");
  if (c.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (c.trials < 0) throw ConfigError("--trials must be nonnegative");
  if (!(c.tol > 0)) throw ConfigError("--tol must be positive");
  if (!(c.delta > 0)) throw ConfigError("--delta must be positive");
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <class F>
void parallel_for(int n, int jobs, F fn) {
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(jobs, n); ++t)
    pool.emplace_back([&] {
      for (int i; (i = next++) < n;) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct Job {
  int k, idx;
};

std::vector<Job> jobs_for(const std::vector<int>& weights) {
  std::vector<Job> out;
  for (int k : weights)
    for (int i = 1; i <= cz_dim_cusp(k); ++i) out.push_back({k, i});
  return out;
}

int cmd_eigenform(const RunConfig& c) {
  const auto weights = parse_weights(c.weights, false);
  std::vector<int> todo;
  for (int k : weights)
    if (cz_dim_cusp(k) > 0) todo.push_back(k);
  std::vector<std::string> msgs(todo.size());
  std::vector<int> ok(todo.size(), 1);
  parallel_for(static_cast<int>(todo.size()), c.jobs, [&](int i) {
    const int k = todo[i];
    std::string m = "k=" + std::to_string(k) + ":";
    for (int idx = 1; idx <= cz_dim_cusp(k); ++idx) {
      cz_eigenform* f = nullptr;
      int cached = 0;
      // Forcing applies once per weight: the first call rebuilds and rewrites every form.
      const cz_status st = cz_eigenform_get(k, idx, c.precision_bits, c.terms, c.cache_dir.c_str(),
                                            c.force && idx == 1, &f, &cached);
      if (st != CZ_OK) {
        m += " idx " + std::to_string(idx) + " failed (" + cz_status_name(st) + ": " + cz_last_error() + ")";
        ok[i] = 0;
        break;
      }
      double resid = 0;
      int pass = 0;
      cz_verify_hecke(f, std::ldexp(1.0, -c.precision_bits / 2), &resid, &pass);
      m += " idx " + std::to_string(idx) + (cached ? " cached" : " built") + " resid=" + num(resid);
      if (!pass) {
        m += " (verification failed)";
        ok[i] = 0;
      }
      cz_eigenform_free(f);
    }
    msgs[i] = m;
  });
  int bad = 0;
  for (size_t i = 0; i < todo.size(); ++i) {
    std::cout << msgs[i] << '\n';
    bad += !ok[i];
  }
  return bad ? kExitPartial : kExitOk;
}

// Loads or builds every form of every weight. Forms of one weight are fetched in order on one
// thread, so a rebuild (which rewrites all of that weight's cache files) never races another.
std::vector<cz_eigenform*> load_forms(const std::vector<Job>& jobs, const RunConfig& c, std::vector<std::string>& errs) {
  std::vector<cz_eigenform*> forms(jobs.size(), nullptr);
  std::vector<size_t> starts;
  for (size_t i = 0; i < jobs.size(); ++i)
    if (i == 0 || jobs[i].k != jobs[i - 1].k) starts.push_back(i);
  parallel_for(static_cast<int>(starts.size()), c.jobs, [&](int w) {
    for (size_t i = starts[w]; i < jobs.size() && jobs[i].k == jobs[starts[w]].k; ++i)
      if (cz_eigenform_get(jobs[i].k, jobs[i].idx, c.precision_bits, c.terms, c.cache_dir.c_str(), 0, &forms[i],
                           nullptr) != CZ_OK)
        errs[i] = cz_last_error();
  });
  return forms;
}

int cmd_census(const RunConfig& c) {
  const auto weights = parse_weights(c.weights, false);
  for (int k : weights) parse_Y(c.Y, k);
  fs::create_directories(c.out);
  const auto jobs = jobs_for(weights);
  std::vector<cz_census*> results(jobs.size(), nullptr);
  std::vector<std::string> errs(jobs.size());
  const auto forms = load_forms(jobs, c, errs);
  parallel_for(static_cast<int>(jobs.size()), c.jobs, [&](int i) {
    const auto [k, idx] = jobs[i];
    cz_eigenform* f = forms[i];
    if (!f) return;
    const auto Ys = parse_Y(c.Y, k);
    cz_census_options opt;
    cz_census_options_default(&opt);
    opt.Ys = Ys.data();
    opt.nY = static_cast<int>(Ys.size());
    opt.tol = c.tol;
    opt.with_witnesses = c.witnesses ? 1 : 0;
    cz_census* rep = nullptr;
    if (cz_census_run(f, &opt, &rep) != CZ_OK) {
      errs[i] = cz_last_error();
    } else {
      const std::string path =
          (fs::path(c.out) / ("census_k" + std::to_string(k) + "_i" + std::to_string(idx) + ".csv")).string();
      if (cz_census_write_zeros(rep, path.c_str()) != CZ_OK) errs[i] = cz_last_error();
      results[i] = rep;
    }
    cz_eigenform_free(f);
  });

  const std::string summary = (fs::path(c.out) / "census_summary.csv").string();
  fs::remove(summary);
  int partial = 0;
  for (size_t i = 0; i < jobs.size(); ++i) {
    const auto [k, idx] = jobs[i];
    if (results[i]) {
      cz_census_append_summary(results[i], summary.c_str());
      int n1, n2, n3;
      cz_census_counts(results[i], &n1, &n2, &n3);
      std::cout << "k=" << k << " idx=" << idx << " delta1=" << n1 << " delta2=" << n2 << " delta3=" << n3;
      if (cz_census_error_count(results[i])) {
        std::cout << " (" << cz_census_error_count(results[i]) << " errors)";
        ++partial;
      }
      std::cout << '\n';
      cz_census_free(results[i]);
    }
    if (!errs[i].empty()) {
      std::cerr << "k=" << k << " idx=" << idx << ": " << errs[i] << '\n';
      std::ofstream(summary, std::ios::app) << k << ',' << idx << ",,,,,,,,,,error\n";
      ++partial;
    }
  }
  return partial ? kExitPartial : kExitOk;
}

int cmd_model(const RunConfig& c) {
  const auto weights = parse_weights(c.weights, true);
  const auto segs = parse_segments(c.segments);
  double lo = 1, hi = 0;  // lo > hi selects each segment's default range
  if (!c.range.empty()) {
    const auto parts = split(c.range, ',');
    if (parts.size() != 2) throw ConfigError("--range expects lo,hi");
    lo = to_double(parts[0]);
    hi = to_double(parts[1]);
    if (!(hi > lo)) throw ConfigError("--range must have lo < hi");
  }
  fs::create_directories(c.out);
  std::ofstream sum(fs::path(c.out) / "model_summary.csv", std::ios::binary | std::ios::trunc);
  sum << "k,segment,expected,mc_trials,mc_mean,mc_stderr,seed\n";
  int partial = 0;
  for (int k : weights) {
    for (cz_segment s : segs) {
      const std::string stem = "k" + std::to_string(k) + "_" + seg_name(s);
      double integrated = 0;
      const std::string prof = (fs::path(c.out) / ("model_" + stem + ".csv")).string();
      if (cz_density_profile_csv(k, s, lo, hi, c.points, prof.c_str(), &integrated) != CZ_OK) {
        std::cerr << stem << ": " << cz_last_error() << '\n';
        ++partial;
        continue;
      }
      double expected = 0;
      if (cz_expected_count(k, s, lo, hi, &expected) != CZ_OK) {
        std::cerr << stem << ": " << cz_last_error() << '\n';
        ++partial;
        continue;
      }
      std::string mc = ",,";
      if (c.trials > 0) {
        if (lo > hi) throw ConfigError("--trials requires an explicit --range");
        std::vector<int> counts(c.trials);
        double mean = 0, se = 0;
        if (cz_monte_carlo(k, s, lo, hi, c.trials, c.seed, 1.0, &mean, &se, counts.data()) != CZ_OK) {
          std::cerr << stem << " monte carlo: " << cz_last_error() << '\n';
          ++partial;
        } else {
          std::ofstream out(fs::path(c.out) / ("mc_" + stem + ".csv"), std::ios::binary | std::ios::trunc);
          out << "trial,count\n";
          for (int t = 0; t < c.trials; ++t) out << t << ',' << counts[t] << '\n';
          mc = num(mean) + ',' + num(se) + ',' + std::to_string(c.seed);
        }
      }
      sum << k << ',' << seg_name(s) << ',' << num(expected) << ',' << c.trials << ',' << mc << '\n';
      std::cout << stem << " expected=" << num(expected) << '\n';
    }
  }
  return partial ? kExitPartial : kExitOk;
}

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("missing input: " + p.string());
  std::string line;
  std::getline(in, line);
  const auto header = split(line, ',');
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    std::map<std::string, std::string> row;
    for (size_t i = 0; i < header.size(); ++i) row[header[i]] = i < cells.size() ? cells[i] : "";
    rows.push_back(row);
  }
  return rows;
}

int cmd_compare(const RunConfig& c) {
  const auto rows = read_csv(fs::path(c.out) / "census_summary.csv");
  std::ofstream out(fs::path(c.out) / "compare.csv", std::ios::binary | std::ios::trunc);
  out << "k,idx,Y,n_delta1,model_delta1,ratio_delta1,n_delta2,model_delta2,ratio_delta2,n_delta3,model_delta3,"
         "ratio_delta3,n_real,pred_real,ratio_real_vs_pred,siegel_ratio\n";
  std::map<int, std::array<double, 3>> model_cache;
  int partial = 0;
  for (const auto& r : rows) {
    if (r.at("status") != "ok") {
      std::cerr << "skipping k=" << r.at("k") << " idx=" << r.at("idx") << ": census status " << r.at("status") << '\n';
      ++partial;
      continue;
    }
    const int k = static_cast<int>(to_long(r.at("k")));
    if (!model_cache.count(k)) {
      std::array<double, 3> m{};
      const cz_segment segs[] = {CZ_DELTA1, CZ_DELTA2, CZ_DELTA3};
      for (int i = 0; i < 3; ++i)
        if (cz_expected_count(k, segs[i], 1, 0, &m[i]) != CZ_OK) m[i] = NAN;
      model_cache[k] = m;
    }
    const auto& m = model_cache[k];
    const double n[3] = {to_double(r.at("n_delta1")), to_double(r.at("n_delta2")), to_double(r.at("n_delta3"))};
    const double pred_real = std::sqrt(static_cast<double>(k)) / (2 * M_PI) * std::log(static_cast<double>(k));
    out << k << ',' << r.at("idx") << ',' << r.at("Y");
    for (int i = 0; i < 3; ++i) out << ',' << n[i] << ',' << num(m[i]) << ',' << num(n[i] / m[i]);
    const double real = n[0] + n[1] + n[2];
    out << ',' << real << ',' << num(pred_real) << ',' << num(real / pred_real) << ',' << r.at("ratio_real") << '\n';
  }
  std::cout << "wrote " << (fs::path(c.out) / "compare.csv").string() << '\n';
  return partial ? kExitPartial : kExitOk;
}

int cmd_ladder(const RunConfig& c) {
  const auto weights = parse_weights(c.weights, false);
  fs::create_directories(c.out);
  std::ofstream out(fs::path(c.out) / "ladder_residuals.csv", std::ios::binary | std::ios::trunc);
  out << "k,idx,l,alpha,lambda_l,residual,status\n";
  int partial = 0;
  const auto jobs = jobs_for(weights);
  std::vector<std::string> errs(jobs.size());
  const auto forms = load_forms(jobs, c, errs);
  for (size_t i = 0; i < jobs.size(); ++i) {
    const auto [k, idx] = jobs[i];
    cz_eigenform* f = forms[i];
    if (!f) {
      std::cerr << "k=" << k << " idx=" << idx << ": " << errs[i] << '\n';
      ++partial;
      continue;
    }
    for (int l = 1; l <= c.lmax; ++l)
      for (double alpha : {0.0, 0.5}) {
        double lam = 0, res = 0;
        cz_lambda(f, l, &lam);
        const cz_status st = cz_theorem2_residual(f, l, alpha, c.delta, &res);
        out << k << ',' << idx << ',' << l << ',' << alpha << ',' << num(lam) << ','
            << (st == CZ_OK ? num(res) : "") << ',' << (st == CZ_OK ? "ok" : cz_status_name(st)) << '\n';
      }
    cz_eigenform_free(f);
  }
  return partial ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real zeros of level-one Hecke eigenforms: eigenforms, censuses, random model"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub, bool weights_required = true) {
    auto* w = sub->add_option("--weights", c.weights, "weights: list, a..b or a..b:step");
    if (weights_required) w->required();
    sub->add_option("--precision-bits", c.precision_bits, "eigenform precision in bits");
    sub->add_option("--terms", c.terms, "stored coefficients (0: default for the weight)");
    sub->add_option("--cache-dir", c.cache_dir, "eigenform cache directory");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--jobs", c.jobs, "parallel weights");
  };

  auto* eig = app.add_subcommand("eigenform", "build or refresh eigenform caches");
  add_common(eig);
  eig->add_flag("--force", c.force, "rebuild valid caches");

  auto* cen = app.add_subcommand("census", "real-zero census per eigenform");
  add_common(cen);
  cen->add_option("--Y", c.Y, "Siegel heights: numbers or <c>sqrtk");
  cen->add_option("--tol", c.tol, "zero bracket width");
  cen->add_flag("--witnesses", c.witnesses, "append sign-combinatorics witnesses to each zero CSV");

  auto* mod = app.add_subcommand("model", "random-model densities, expected counts and Monte Carlo");
  add_common(mod);
  mod->add_option("--segments", c.segments, "comma-separated segments");
  mod->add_option("--trials", c.trials, "Monte Carlo trials (0: none)");
  mod->add_option("--seed", c.seed, "Monte Carlo seed");
  mod->add_option("--range", c.range, "parameter range lo,hi (default: whole segment)");
  mod->add_option("--points", c.points, "density profile samples");

  auto* cmp = app.add_subcommand("compare", "join census summary with model predictions");
  cmp->add_option("--out", c.out, "directory holding census_summary.csv");

  auto* lad = app.add_subcommand("ladder", "approximation residuals on the y_l ladder");
  add_common(lad);
  lad->add_option("--delta", c.delta, "window parameter");
  lad->add_option("--lmax", c.lmax, "largest l");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    validate(c);
    if (*eig) return cmd_eigenform(c);
    if (*cen) return cmd_census(c);
    if (*mod) return cmd_model(c);
    if (*cmp) return cmd_compare(c);
    if (*lad) return cmd_ladder(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitConfig;
}
