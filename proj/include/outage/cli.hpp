#ifndef OUTAGE_CLI_HPP
#define OUTAGE_CLI_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "outage/allocator.hpp"
#include "outage/calculus.hpp"
#include "outage/error.hpp"
#include "outage/oracle.hpp"
#include "outage/verify.hpp"

namespace outage::cli {

enum ExitCode : int { kOk = 0, kPropertyFailure = 1, kUsage = 2, kIoError = 3 };

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Format { kText, kJson, kCsv };

/// Shortest decimal that round-trips to the same double.
inline std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// Fixed 15-significant-digit scientific notation.
inline std::string sci15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.14e", v);
  return buf;
}

/// One command's output: schema_version, command, inputs, results.
class Record {
 public:
  explicit Record(std::string command) : command_(std::move(command)) {}

  nlohmann::ordered_json& inputs() { return inputs_; }

  void number(const std::string& name, double v) {
    require_finite(name, v);
    results_[name] = v;
    order_.push_back(name);
  }
  void integer(const std::string& name, std::int64_t v) {
    results_[name] = v;
    order_.push_back(name);
  }
  void unsigned_integer(const std::string& name, std::uint64_t v) {
    results_[name] = v;
    order_.push_back(name);
  }
  void flag(const std::string& name, bool v) {
    results_[name] = v;
    order_.push_back(name);
  }
  void vector(const std::string& name, const std::vector<double>& v) {
    for (double z : v) require_finite(name, z);
    results_[name] = {{"length", v.size()}, {"values", v}};
    order_.push_back(name);
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = "1";
    j["command"] = command_;
    j["inputs"] = inputs_.is_null() ? nlohmann::ordered_json::object() : inputs_;
    j["results"] = results_.is_null() ? nlohmann::ordered_json::object() : results_;
    return j;
  }

  /// Header line and value line; vectors expand to name_1..name_n.
  std::string csv() const {
    std::string head, row;
    auto cell = [&](const std::string& h, const std::string& v) {
      if (!head.empty()) {
        head += ',';
        row += ',';
      }
      head += h;
      row += v;
    };
    for (const std::string& name : order_) {
      const auto& v = results_.at(name);
      if (v.is_object()) {
        const auto& vals = v.at("values");
        for (std::size_t i = 0; i < vals.size(); ++i) {
          cell(name + "_" + std::to_string(i + 1), sci15(vals[i].get<double>()));
        }
      } else {
        cell(name, scalar(v, true));
      }
    }
    return head + "\n" + row + "\n";
  }

  std::string text() const {
    std::string s;
    for (const std::string& name : order_) {
      const auto& v = results_.at(name);
      s += name + " = ";
      if (v.is_object()) {
        const auto& vals = v.at("values");
        s += "[";
        for (std::size_t i = 0; i < vals.size(); ++i) {
          if (i) s += ", ";
          s += shortest(vals[i].get<double>());
        }
        s += "]";
      } else {
        s += scalar(v, false);
      }
      s += "\n";
    }
    return s;
  }

  void emit(std::ostream& out, Format f) const {
    switch (f) {
      case Format::kJson: out << json().dump(2) << "\n"; break;
      case Format::kCsv: out << csv(); break;
      case Format::kText: out << text(); break;
    }
  }

 private:
  static void require_finite(const std::string& name, double v) {
    if (!std::isfinite(v)) throw AccuracyError("non-finite result for " + name);
  }

  static std::string scalar(const nlohmann::ordered_json& v, bool csv) {
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    return csv ? sci15(v.get<double>()) : shortest(v.get<double>());
  }

  std::string command_;
  nlohmann::ordered_json inputs_;
  nlohmann::ordered_json results_;
  std::vector<std::string> order_;
};

/// Parses "0.5,0.5" into Weights; diagnostics name the entry (1-based).
inline Weights parse_weights(const std::string& text) {
  std::vector<double> v;
  std::size_t start = 0;
  for (std::size_t entry = 1;; ++entry) {
    const std::size_t comma = text.find(',', start);
    std::string_view tok(text.data() + start,
                         (comma == std::string::npos ? text.size() : comma) - start);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    double z = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), z);
    if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
      throw UsageError("--weights entry " + std::to_string(entry) + " ('" +
                       std::string(tok) + "') is not a number");
    }
    v.push_back(z);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  try {
    return Weights(v);
  } catch (const InvalidWeights& e) {
    if (e.index() == InvalidWeights::npos) throw UsageError(std::string("--weights: ") + e.what());
    throw UsageError("--weights entry " + std::to_string(e.index() + 1) + " (" +
                     shortest(v[e.index()]) + ") is negative or not finite");
  }
}

struct OutageArgs {
  std::string weights;
  double x = 0.0;
  bool grad = false;
  std::vector<std::string> mc;
};

inline Record cmd_outage(const OutageArgs& a, unsigned threads) {
  const Weights q = parse_weights(a.weights);
  Record rec("outage");
  rec.inputs()["weights"] = q.vector();
  rec.inputs()["x"] = a.x;
  const double p = outage_probability(q, a.x);
  rec.number("outage", p);
  if (a.grad) rec.vector("gradient", outage_gradient(q, a.x));
  if (!a.mc.empty()) {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    const auto& ns = a.mc[0];
    const auto& ss = a.mc[1];
    if (std::from_chars(ns.data(), ns.data() + ns.size(), n).ptr != ns.data() + ns.size() ||
        std::from_chars(ss.data(), ss.data() + ss.size(), seed).ptr != ss.data() + ss.size()) {
      throw UsageError("--mc expects an integer sample count and an integer seed");
    }
    if (n < 10000) throw UsageError("--mc sample count must be at least 10000");
    rec.inputs()["mc_n"] = n;
    rec.inputs()["mc_seed"] = seed;
    const McEstimate mc = monte_carlo(q, a.x, n, seed, threads);
    rec.number("mc_p_hat", mc.p_hat);
    rec.number("mc_stderr", mc.std_error);
    rec.integer("mc_n", mc.n);
    rec.unsigned_integer("mc_seed", mc.seed);
    rec.number("mc_z", mc.std_error > 0.0 ? (mc.p_hat - p) / mc.std_error : 0.0);
  }
  return rec;
}

struct AllocArgs {
  std::optional<double> x, rate, snr;
  int t = 0;
};

inline Record cmd_alloc(const AllocArgs& a) {
  const bool has_x = a.x.has_value();
  const bool has_rate = a.rate.has_value() || a.snr.has_value();
  if (has_x == has_rate) {
    throw UsageError("alloc needs exactly one of --x or (--rate and --snr)");
  }
  if (has_rate && !(a.rate && a.snr)) {
    throw UsageError("--rate and --snr must be given together");
  }
  if (a.t < 1) throw UsageError("--t must be at least 1");
  Record rec("alloc");
  double x = 0.0;
  if (has_x) {
    x = *a.x;
    rec.inputs()["x"] = x;
  } else {
    x = rate_to_threshold(*a.rate, *a.snr);
    rec.inputs()["rate"] = *a.rate;
    rec.inputs()["snr"] = *a.snr;
  }
  rec.inputs()["t"] = a.t;
  const Allocation al = optimal_k(x, a.t);
  rec.number("x", x);
  rec.integer("k", al.k);
  rec.vector("q", al.q.vector());
  rec.number("outage", al.outage);
  rec.flag("degenerate", al.degenerate);
  return rec;
}

/// CSV body of figure1: the tab table, a blank line, then the step samples.
inline std::string figure1_csv(const CrossingTable& table,
                               const std::vector<StepSample>& steps) {
  std::string s = "k,x_k,outage_k\n";
  for (const Crossing& c : table.rows) {
    s += std::to_string(c.k) + "," + sci15(c.x) + "," + sci15(c.outage) + "\n";
  }
  s += "\noutage,k_opt\n";
  for (const StepSample& st : steps) {
    s += sci15(st.outage) + "," + std::to_string(st.k_opt) + "\n";
  }
  return s;
}

struct Figure1Args {
  int t = 0;
  std::string csv_path;
  int samples = 200;
};

inline int cmd_figure1(const Figure1Args& a, Format f, unsigned threads,
                       std::ostream& out) {
  if (a.t < 2) throw UsageError("figure1 needs --t >= 2");
  const CrossingTable table = figure1_table(a.t, threads);
  const auto steps = figure1_steps(table, a.samples);
  const std::string body = figure1_csv(table, steps);

  if (!a.csv_path.empty()) {
    std::ofstream file(a.csv_path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + a.csv_path + "' for writing");
    file << body;
    file.close();
    if (!file) throw IoError("failed writing '" + a.csv_path + "'");
  }
  if (f == Format::kJson) {
    Record rec("figure1");
    rec.inputs()["t"] = a.t;
    std::vector<double> ks, xs, ps, so, sk;
    for (const Crossing& c : table.rows) {
      ks.push_back(c.k);
      xs.push_back(c.x);
      ps.push_back(c.outage);
    }
    for (const StepSample& st : steps) {
      so.push_back(st.outage);
      sk.push_back(st.k_opt);
    }
    rec.vector("k", ks);
    rec.vector("x_k", xs);
    rec.vector("outage_k", ps);
    rec.vector("step_outage", so);
    rec.vector("step_k_opt", sk);
    rec.emit(out, Format::kJson);
  } else if (a.csv_path.empty()) {
    out << body;
  } else {
    out << "wrote " << table.rows.size() << " tabs and " << steps.size()
        << " step samples to " << a.csv_path << "\n";
  }
  return kOk;
}

inline int cmd_verify(const std::string& suite, const verify::Options& opt,
                      Format f, std::ostream& out) {
  if (suite != "lemmas" && suite != "conjecture" && suite != "prooflab" &&
      suite != "all") {
    throw UsageError("unknown suite '" + suite + "' (lemmas|conjecture|prooflab|all)");
  }
  if (opt.t < 2 || opt.t > 4) throw UsageError("verify --t must be in 2..4");
  if (opt.grid < 50) throw UsageError("verify --grid must be at least 50");
  const auto checks = verify::run_suite(suite, opt);
  const bool ok = verify::all_passed(checks);
  if (f == Format::kJson) {
    nlohmann::ordered_json j;
    j["schema_version"] = "1";
    j["command"] = "verify";
    j["inputs"] = {{"suite", suite}, {"t", opt.t}, {"grid", opt.grid}, {"seed", opt.seed}};
    nlohmann::ordered_json res = nlohmann::ordered_json::object();
    for (const auto& c : checks) {
      res[c.name] = {{"passed", c.passed}, {"measured", c.measured},
                     {"threshold", c.threshold}};
    }
    res["all_passed"] = ok;
    j["results"] = res;
    out << j.dump(2) << "\n";
  } else if (f == Format::kCsv) {
    out << "check,passed,measured,threshold\n";
    for (const auto& c : checks) {
      out << c.name << "," << (c.passed ? "true" : "false") << ","
          << sci15(c.measured) << "," << sci15(c.threshold) << "\n";
    }
  } else {
    for (const auto& c : checks) {
      out << (c.passed ? "PASS " : "FAIL ") << c.name
          << "  measured=" << shortest(c.measured)
          << "  threshold=" << shortest(c.threshold) << "\n";
    }
    out << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  }
  return ok ? kOk : kPropertyFailure;
}

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Outage probability of weighted exponential sums: evaluation, "
               "optimal allocation and verification."};
  app.name("outage_cli");
  app.require_subcommand(1, 1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "cap on worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  auto add_format = [](CLI::App* sub, bool& json, bool& csv) {
    auto* j = sub->add_flag("--json", json, "emit a JSON record");
    auto* c = sub->add_flag("--csv", csv, "emit CSV");
    j->excludes(c);
  };

  OutageArgs oa;
  bool o_json = false, o_csv = false;
  auto* outage_cmd = app.add_subcommand("outage", "P{<q, X> <= x}");
  outage_cmd->fallthrough();
  outage_cmd->add_option("--weights", oa.weights, "comma-separated allocation")->required();
  outage_cmd->add_option("--x", oa.x, "threshold")->required();
  outage_cmd->add_flag("--grad", oa.grad, "append the gradient");
  outage_cmd->add_option("--mc", oa.mc, "Monte Carlo check: N SEED")->expected(2);
  add_format(outage_cmd, o_json, o_csv);

  AllocArgs aa;
  double ax = 0, arate = 0, asnr = 0;
  bool a_json = false, a_csv = false;
  auto* alloc_cmd = app.add_subcommand("alloc", "optimal uniform-over-k allocation");
  alloc_cmd->fallthrough();
  auto* x_opt = alloc_cmd->add_option("--x", ax, "threshold");
  auto* rate_opt = alloc_cmd->add_option("--rate", arate, "rate in nats");
  auto* snr_opt = alloc_cmd->add_option("--snr", asnr, "signal-to-noise ratio");
  alloc_cmd->add_option("--t", aa.t, "number of antennas")->required();
  add_format(alloc_cmd, a_json, a_csv);

  Figure1Args fa;
  bool f_json = false;
  auto* fig_cmd = app.add_subcommand("figure1", "crossing tabs and step function as CSV");
  fig_cmd->fallthrough();
  fig_cmd->add_option("--t", fa.t, "number of antennas")->required();
  fig_cmd->add_option("--csv", fa.csv_path, "write the CSV to this path");
  fig_cmd->add_option("--samples", fa.samples, "step-function samples")
      ->check(CLI::Range(2, 1000000));
  fig_cmd->add_flag("--json", f_json, "emit a JSON record");

  std::string suite;
  verify::Options vo;
  bool v_json = false, v_csv = false;
  auto* verify_cmd = app.add_subcommand("verify", "run a property suite");
  verify_cmd->fallthrough();
  verify_cmd->add_option("suite", suite, "lemmas | conjecture | prooflab | all")->required();
  verify_cmd->add_option("--t", vo.t, "antennas for the conjecture suite (2..4)");
  verify_cmd->add_option("--grid", vo.grid, "lattice resolution for brute force");
  verify_cmd->add_option("--seed", vo.seed, "seed for random cases");
  add_format(verify_cmd, v_json, v_csv);

  std::vector<std::string> argv_store{"outage_cli"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto fmt = [](bool json, bool csv) {
    return json ? Format::kJson : csv ? Format::kCsv : Format::kText;
  };
  try {
    if (*outage_cmd) {
      cmd_outage(oa, threads).emit(out, fmt(o_json, o_csv));
      return kOk;
    }
    if (*alloc_cmd) {
      if (*x_opt) aa.x = ax;
      if (*rate_opt) aa.rate = arate;
      if (*snr_opt) aa.snr = asnr;
      cmd_alloc(aa).emit(out, fmt(a_json, a_csv));
      return kOk;
    }
    if (*fig_cmd) return cmd_figure1(fa, fmt(f_json, false), threads, out);
    if (*verify_cmd) {
      vo.threads = threads;
      return cmd_verify(suite, vo, fmt(v_json, v_csv), out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kPropertyFailure;
  }
  return kUsage;
}

}  // namespace outage::cli

#endif  // OUTAGE_CLI_HPP
