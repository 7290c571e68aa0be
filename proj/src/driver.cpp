#include "synrg/driver.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "synrg/errors.h"
#include "synrg/eval.h"
#include "synrg/generalization.h"
#include "synrg/sygus_io.h"

namespace synrg {

namespace {

using Clock = std::chrono::steady_clock;
using Millis = std::chrono::milliseconds;

long long since(Clock::time_point t0) {
  return std::chrono::duration_cast<Millis>(Clock::now() - t0).count();
}

std::int64_t eval_length(const Problem &p, int bound) {
  std::int64_t len = std::max<std::int64_t>(2, bound);
  for (const auto &c : p.constraints)
    if (auto m = max_constant_index(c))
      len = std::max(len, *m + 1);
  return len;
}

std::string synth_outcome_name(const SynthOutcome &o) {
  if (std::holds_alternative<SynthSolved>(o))
    return "solved";
  if (std::holds_alternative<SynthInfeasible>(o))
    return "infeasible";
  if (std::holds_alternative<SynthTimedOut>(o))
    return "timeout";
  return "unknown";
}

std::string print_model_value(const ModelValue &v) {
  if (const auto *i = std::get_if<std::int64_t>(&v))
    return std::to_string(*i);
  if (const auto *b = std::get_if<bool>(&v))
    return *b ? "true" : "false";
  const auto &a = std::get<ArrayModel>(v);
  std::string out = "[";
  for (const auto &[idx, val] : a.entries)
    out += std::to_string(idx) + ":" + std::to_string(val) + " ";
  out += "default " + std::to_string(a.def) + "]";
  return out;
}

std::string print_bindings(const std::map<std::string, Expr> &bs) {
  std::string out;
  for (const auto &[name, body] : bs) {
    if (!out.empty())
      out += "; ";
    out += name + " = " + print_term(body);
  }
  return out;
}

std::optional<Expr> first_binding(const std::map<std::string, Expr> &bs) {
  if (bs.empty())
    return std::nullopt;
  return bs.begin()->second;
}

struct SynthResult {
  SynthOutcome outcome = SynthUnknown{"not attempted"};
  bool backend_dead = false;
};

struct Driver {
  const Problem &p;
  const PipelineConfig &cfg;
  RunReport rep;
  Clock::time_point start = Clock::now();
  Clock::time_point deadline;
  // best unverified candidate, kept for --accept-unverified
  std::optional<std::pair<std::map<std::string, Expr>, std::string>> fallback;

  Driver(const Problem &prob, const PipelineConfig &c)
      : p(prob), cfg(c), deadline(start + c.total_timeout) {}

  void record(int b, std::string phase, std::string outcome, long long ms,
              std::optional<Expr> cand = std::nullopt, std::string detail = "") {
    rep.records.push_back(
        {b, std::move(phase), std::move(outcome), ms, std::move(cand),
         std::move(detail)});
  }

  Millis remaining() const {
    auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now());
    return left.count() > 0 ? left : Millis{0};
  }

  InternalSynth internal_synth(Millis timeout, std::int64_t len) const {
    InternalSynth s;
    s.limits.max_size = cfg.max_term_size;
    s.limits.max_candidates = cfg.max_candidates;
    s.limits.timeout = timeout;
    s.limits.array_len = len;
    s.limits.value_min = cfg.value_min;
    s.limits.value_max = cfg.value_max;
    return s;
  }

  InternalVerify internal_verify(std::int64_t len) const {
    InternalVerify v;
    v.config.array_len = len;
    v.config.value_min = cfg.value_min;
    v.config.value_max = cfg.value_max;
    return v;
  }

  SynthResult run_synth(const Problem &prob,
                        const std::map<std::string, Grammar> &grammars,
                        Millis timeout, std::int64_t len, int b,
                        const std::string &phase) {
    auto t0 = Clock::now();
    SynthResult r;
    std::string note;
    try {
      if (cfg.synth_solver) {
        SolverSpec spec = *cfg.synth_solver;
        spec.wall_timeout = timeout;
        r.outcome = synthesize(prob, grammars, timeout, spec);
      } else {
        r.outcome = synthesize(prob, grammars, timeout,
                               internal_synth(timeout, len));
      }
    } catch (const BackendUnavailable &e) {
      if (cfg.synth_solver && cfg.use_internal_fallback) {
        note = std::string("backend unavailable (") + e.what() +
               "), fell back to internal enumeration";
        try {
          r.outcome = synthesize(prob, grammars, timeout,
                                 internal_synth(timeout, len));
        } catch (const BackendUnavailable &) {
          r.backend_dead = true;
        }
      } else {
        r.backend_dead = true;
        note = e.what();
      }
    }
    std::string name = r.backend_dead ? "backend-unavailable"
                                      : synth_outcome_name(r.outcome);
    std::optional<Expr> cand;
    if (const auto *s = solved(r.outcome)) {
      cand = first_binding(s->bindings);
      if (note.empty())
        note = print_bindings(s->bindings);
    } else if (const auto *u = std::get_if<SynthUnknown>(&r.outcome)) {
      if (note.empty())
        note = u->reason;
    }
    record(b, phase, name, since(t0), cand, note);
    return r;
  }

  // Returns valid / counterexample / unknown / timeout / dead.
  std::string run_verify(const std::map<std::string, Expr> &bindings, int b,
                         std::int64_t len, const std::string &phase) {
    auto t0 = Clock::now();
    VerifyOutcome v = VerifyUnknown{"not attempted"};
    bool dead = false;
    std::string note;
    try {
      if (cfg.smt_solver) {
        SolverSpec spec = *cfg.smt_solver;
        spec.wall_timeout = cfg.verify_timeout;
        v = verify(p, bindings, spec);
      } else {
        v = verify(p, bindings, internal_verify(len));
      }
    } catch (const BackendUnavailable &e) {
      if (cfg.smt_solver && cfg.use_internal_fallback) {
        note = std::string("backend unavailable (") + e.what() +
               "), fell back to bounded internal verification";
        try {
          v = verify(p, bindings, internal_verify(len));
        } catch (const BackendUnavailable &) {
          dead = true;
        }
      } else {
        dead = true;
        note = e.what();
      }
    }
    std::string name = "unknown";
    if (dead) {
      name = "backend-unavailable";
    } else if (const auto *ok = std::get_if<VerifyValid>(&v)) {
      name = "valid";
      if (note.empty())
        note = ok->method;
    } else if (const auto *cex = std::get_if<VerifyCounterExample>(&v)) {
      name = "counterexample";
      std::string m;
      for (const auto &[var, val] : cex->model) {
        if (!m.empty())
          m += ", ";
        m += var + " = " + print_model_value(val);
      }
      if (note.empty())
        note = m;
    } else if (const auto *u = std::get_if<VerifyUnknown>(&v)) {
      if (note.empty())
        note = u->reason;
    } else if (std::holds_alternative<VerifyTimedOut>(v)) {
      name = "timeout";
    }
    record(b, phase, name, since(t0), first_binding(bindings), note);
    if (dead)
      return "backend-unavailable";
    return name;
  }

  // Accepts a solved candidate: simplifies bodies, returns bindings keyed
  // by synth-fun name (missing entries are impossible for gated outcomes).
  std::map<std::string, Expr> tidy(const std::map<std::string, Expr> &raw) {
    std::map<std::string, Expr> out;
    for (const auto &[name, body] : raw)
      out[name] = simplify(body);
    return out;
  }

  RunReport finish_solved(std::map<std::string, Expr> bindings,
                          const std::string &phase) {
    rep.solved = true;
    rep.verified = true;
    rep.solved_phase = phase;
    rep.bindings = std::move(bindings);
    rep.wall_millis = since(start);
    return rep;
  }

  RunReport finish_failed(FailReason why) {
    if (cfg.accept_unverified && fallback) {
      rep.solved = true;
      rep.verified = false;
      rep.solved_phase = fallback->second;
      rep.bindings = fallback->first;
      rep.wall_millis = since(start);
      return rep;
    }
    rep.solved = false;
    rep.fail_reason = why;
    rep.wall_millis = since(start);
    return rep;
  }

  RunReport run() {
    rep.fragment = classify_array_property(mk_and(p.constraints));
    const std::int64_t full_len = eval_length(p, cfg.bound.b_start);

    for (int b = cfg.bound.b_start; b <= cfg.bound.b_max; b += cfg.bound.step) {
      rep.final_bound = b;
      if (remaining() == Millis{0}) {
        record(b, "budget", "total-timeout", 0);
        return finish_failed(FailReason::TotalTimeout);
      }

      // 1. restrict to a quantifier-free bounded problem
      auto t0 = Clock::now();
      BoundedProblem bp = restrict_spec(p, b);
      Problem bounded = bp.as_problem();
      record(b, "restrict", "ok", since(t0), mk_and(bounded.constraints));
      const std::int64_t bounded_len = eval_length(bounded, b);

      // 2. synthesize a bounded solution: fast pass without a grammar,
      //    then the default template grammar with the long budget
      SynthResult sr = run_synth(bounded, {}, cfg.fast_synth_timeout,
                                 bounded_len, b, "synth-fast");
      if (!sr.backend_dead && !solved(sr.outcome) &&
          !std::holds_alternative<SynthInfeasible>(sr.outcome)) {
        std::map<std::string, Grammar> grammars;
        for (const auto &f : bounded.synth_funs)
          grammars[f.name] = build_template_grammar(f, b);
        Millis budget = std::min(cfg.template_synth_timeout, remaining());
        sr = run_synth(bounded, grammars, budget, bounded_len, b,
                       "synth-template");
      }
      if (sr.backend_dead)
        return finish_failed(FailReason::BackendUnavailable);
      if (!solved(sr.outcome))
        continue; // infeasible, timeout or unknown at this bound

      // 3. syntactic generalization of the bounded solution
      t0 = Clock::now();
      std::map<std::string, Expr> bounded_bindings =
          tidy(solved(sr.outcome)->bindings);
      FreshVarGen zgen(1);
      std::map<std::string, Expr> candidate;
      for (const auto &[name, body] : bounded_bindings)
        candidate[name] =
            syntactic_generalize(body, b, zgen, cfg.generalization_trace);
      record(b, "generalize", "ok", since(t0), first_binding(candidate),
             print_bindings(candidate));

      // 4. verify the generalized candidate against the full problem
      std::string v =
          run_verify(candidate, b, full_len, "verify");
      if (v == "valid")
        return finish_solved(candidate, "syntactic");
      if (v == "backend-unavailable")
        return finish_failed(FailReason::BackendUnavailable);
      if (v != "counterexample" && !fallback)
        fallback = {candidate, "syntactic"};

      if (remaining() == Millis{0}) {
        record(b, "budget", "total-timeout", 0);
        return finish_failed(FailReason::TotalTimeout);
      }

      // 5. synthesis-based generalization: re-synthesize against the full
      //    problem from a grammar seeded with the candidate's predicates
      std::map<std::string, Grammar> gen_grammars;
      bool seedable = true;
      for (const auto &f : p.synth_funs) {
        auto it = candidate.find(f.name);
        if (it == candidate.end()) {
          seedable = false;
          break;
        }
        gen_grammars[f.name] = build_generalization_grammar(it->second, f);
      }
      if (seedable) {
        SynthResult gr = run_synth(p, gen_grammars, remaining(), full_len, b,
                                   "synth-generalization");
        if (gr.backend_dead)
          return finish_failed(FailReason::BackendUnavailable);
        if (solved(gr.outcome)) {
          std::map<std::string, Expr> lifted = tidy(solved(gr.outcome)->bindings);
          std::string gv =
              run_verify(lifted, b, full_len, "verify-generalization");
          if (gv == "valid")
            return finish_solved(lifted, "synthesis-based");
          if (gv == "backend-unavailable")
            return finish_failed(FailReason::BackendUnavailable);
          if (gv != "counterexample" && !fallback)
            fallback = {lifted, "synthesis-based"};
        }
      }
    }
    return finish_failed(FailReason::BoundExhausted);
  }
};

} // namespace

std::string to_string(FailReason r) {
  switch (r) {
  case FailReason::BoundExhausted:
    return "bound-exhausted";
  case FailReason::TotalTimeout:
    return "total-timeout";
  case FailReason::BackendUnavailable:
    return "backend-unavailable";
  }
  return "unknown";
}

RunReport solve(const Problem &p, const PipelineConfig &cfg) {
  if (cfg.fast_synth_timeout > cfg.template_synth_timeout ||
      cfg.template_synth_timeout > cfg.total_timeout)
    throw std::invalid_argument(
        "timeouts must satisfy fast <= template <= total");
  Driver d(p, cfg);
  return d.run();
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["status"] = solved ? "solved" : "failed";
  if (solved) {
    j["verified"] = verified;
    j["phase"] = solved_phase;
    nlohmann::json bs = nlohmann::json::object();
    for (const auto &[name, body] : bindings)
      bs[name] = print_term(body);
    j["bindings"] = bs;
  } else {
    j["reason"] = to_string(fail_reason);
  }
  j["final_bound"] = final_bound;
  j["wall_millis"] = wall_millis;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto &r : records) {
    nlohmann::json rj;
    rj["bound"] = r.bound;
    rj["phase"] = r.phase;
    rj["outcome"] = r.outcome;
    rj["millis"] = r.millis;
    if (r.candidate)
      rj["candidate"] = print_term(*r.candidate);
    if (!r.detail.empty())
      rj["detail"] = r.detail;
    recs.push_back(rj);
  }
  j["iterations"] = recs;
  nlohmann::json frag;
  frag["in_fragment"] = fragment.in_fragment;
  nlohmann::json viols = nlohmann::json::array();
  for (const auto &[path, why] : fragment.violations)
    viols.push_back({{"path", path}, {"reason", why}});
  frag["violations"] = viols;
  if (fragment.index_guard)
    frag["index_guard"] = print_term(*fragment.index_guard);
  if (fragment.value_constraint)
    frag["value_constraint"] = print_term(*fragment.value_constraint);
  j["fragment"] = frag;
  return j;
}

// --- benchmarks -----------------------------------------------------------

namespace {

BenchmarkRow bench_one(const std::filesystem::path &file,
                       const PipelineConfig &cfg) {
  BenchmarkRow row;
  row.file = file.string();
  std::ifstream in(file);
  std::ostringstream buf;
  buf << in.rdbuf();
  auto t0 = Clock::now();
  try {
    Problem p = parse_problem(buf.str());
    RunReport rep = solve(p, cfg);
    row.millis = since(t0);
    row.final_bound = rep.final_bound;
    if (rep.solved) {
      row.outcome = "solved";
      row.verified = rep.verified;
      row.phase = rep.solved_phase;
      row.detail = print_bindings(rep.bindings);
    } else {
      row.outcome = to_string(rep.fail_reason);
    }
  } catch (const std::runtime_error &e) {
    row.millis = since(t0);
    row.outcome = "parse-error";
    row.detail = e.what();
  }
  return row;
}

} // namespace

BenchmarkReport run_benchmarks(const std::string &dir,
                               const PipelineConfig &cfg, int jobs) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::exists(dir))
    for (const auto &entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".sl")
        files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  BenchmarkReport report;
  report.rows.resize(files.size());
  if (jobs < 1)
    jobs = 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < files.size();
         i = next.fetch_add(1))
      report.rows[i] = bench_one(files[i], cfg);
  };
  if (jobs == 1 || files.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    int n = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(jobs), files.size()));
    for (int i = 0; i < n; ++i)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }
  return report;
}

nlohmann::json BenchmarkReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  std::map<std::string, int> counts;
  std::vector<long long> times;
  for (const auto &r : rows) {
    nlohmann::json rj;
    rj["file"] = r.file;
    rj["outcome"] = r.outcome;
    if (r.outcome == "solved") {
      rj["verified"] = r.verified;
      rj["phase"] = r.phase;
    }
    rj["final_bound"] = r.final_bound;
    rj["millis"] = r.millis;
    if (!r.detail.empty())
      rj["detail"] = r.detail;
    rows_json.push_back(rj);
    counts[r.outcome]++;
    times.push_back(r.millis);
  }
  nlohmann::json j;
  j["rows"] = rows_json;
  nlohmann::json agg;
  agg["total"] = rows.size();
  for (const auto &[k, v] : counts)
    agg[k] = v;
  if (!times.empty()) {
    std::sort(times.begin(), times.end());
    long long sum = 0;
    for (long long t : times)
      sum += t;
    agg["median_millis"] = times[times.size() / 2];
    agg["mean_millis"] = sum / static_cast<long long>(times.size());
  }
  j["aggregate"] = agg;
  return j;
}

std::string BenchmarkReport::to_table() const {
  std::size_t w = 4;
  for (const auto &r : rows)
    w = std::max(w, std::filesystem::path(r.file).filename().string().size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(w) + 2) << "file"
      << std::setw(22) << "outcome" << std::setw(17) << "phase"
      << std::setw(7) << "bound" << "millis\n";
  int solved_count = 0;
  for (const auto &r : rows) {
    std::string name = std::filesystem::path(r.file).filename().string();
    std::string outcome = r.outcome;
    if (r.outcome == "solved") {
      ++solved_count;
      outcome += r.verified ? " (verified)" : " (unverified)";
    }
    out << std::left << std::setw(static_cast<int>(w) + 2) << name
        << std::setw(22) << outcome << std::setw(17)
        << (r.phase.empty() ? "-" : r.phase) << std::setw(7) << r.final_bound
        << r.millis << "\n";
  }
  out << "solved " << solved_count << "/" << rows.size() << "\n";
  return out.str();
}

} // namespace synrg
