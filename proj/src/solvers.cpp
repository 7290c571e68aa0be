#include "synrg/solvers.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <vector>

#include "synrg/enumerator.h"
#include "synrg/generalization.h"

namespace synrg {

namespace {

std::vector<std::string> split_command(const std::string &command) {
  std::istringstream is(command);
  std::vector<std::string> parts;
  std::string tok;
  while (is >> tok)
    parts.push_back(tok);
  return parts;
}

std::string write_temp_file(const std::string &content, const char *suffix) {
  std::string templ = std::string("/tmp/synrg-XXXXXX") + suffix;
  std::vector<char> buf(templ.begin(), templ.end());
  buf.push_back('\0');
  int fd = mkstemps(buf.data(), static_cast<int>(std::strlen(suffix)));
  if (fd < 0)
    throw BackendUnavailable("cannot create temporary query file");
  std::size_t off = 0;
  while (off < content.size()) {
    ssize_t n = write(fd, content.data() + off, content.size() - off);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      close(fd);
      throw BackendUnavailable("cannot write temporary query file");
    }
    off += static_cast<std::size_t>(n);
  }
  close(fd);
  return std::string(buf.data());
}

Model model_from_valuation(const Valuation &v) {
  Model m;
  for (const auto &[name, value] : v) {
    if (const auto *i = std::get_if<std::int64_t>(&value)) {
      m[name] = *i;
    } else if (const auto *b = std::get_if<bool>(&value)) {
      m[name] = *b;
    } else {
      const auto &a = std::get<ArrayValue>(value);
      ArrayModel am;
      am.entries = a.entries;
      am.def = a.def;
      m[name] = am;
    }
  }
  return m;
}

std::int64_t model_footprint(const Model &m) {
  std::int64_t len = 1;
  for (const auto &[name, value] : m) {
    (void)name;
    if (const auto *a = std::get_if<ArrayModel>(&value))
      for (const auto &[idx, val] : a->entries) {
        (void)val;
        len = std::max(len, idx + 1);
      }
  }
  return len;
}

} // namespace

RunResult run_solver_process(const std::string &command,
                             const std::string &file,
                             std::chrono::milliseconds timeout) {
  RunResult result;
  std::vector<std::string> args = split_command(command);
  if (args.empty()) {
    result.spawn_failed = true;
    return result;
  }
  args.push_back(file);

  int fds[2];
  if (pipe(fds) != 0) {
    result.spawn_failed = true;
    return result;
  }
  // close-on-exec status pipe: a byte arrives only when exec itself failed
  int efds[2];
  if (pipe2(efds, O_CLOEXEC) != 0) {
    close(fds[0]);
    close(fds[1]);
    result.spawn_failed = true;
    return result;
  }

  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    close(efds[0]);
    close(efds[1]);
    result.spawn_failed = true;
    return result;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0)
      dup2(devnull, STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    close(efds[0]);
    std::vector<char *> argv;
    argv.reserve(args.size() + 1);
    for (auto &a : args)
      argv.push_back(a.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    char err = 1;
    ssize_t ignored = write(efds[1], &err, 1);
    (void)ignored;
    _exit(127);
  }

  setpgid(pid, pid); // either side may win the race; both set the same group
  close(fds[1]);
  close(efds[1]);

  auto deadline = std::chrono::steady_clock::now() + timeout;
  bool killed = false;
  char buf[4096];
  while (true) {
    auto now = std::chrono::steady_clock::now();
    if (!killed && now >= deadline) {
      killpg(pid, SIGKILL);
      result.timed_out = true;
      killed = true;
    }
    int wait_ms = 200;
    if (!killed) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                      deadline - now)
                      .count();
      wait_ms = static_cast<int>(std::min<long long>(left + 1, 200));
      if (wait_ms < 0)
        wait_ms = 0;
    }
    struct pollfd pfd = {fds[0], POLLIN, 0};
    int pr = poll(&pfd, 1, wait_ms);
    if (pr < 0) {
      if (errno == EINTR)
        continue;
      break;
    }
    if (pr == 0)
      continue;
    ssize_t n = read(fds[0], buf, sizeof(buf));
    if (n > 0) {
      result.output.append(buf, static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR)
      continue;
    break; // EOF or unrecoverable error
  }
  close(fds[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);

  char err = 0;
  ssize_t en;
  while ((en = read(efds[0], &err, 1)) < 0 && errno == EINTR) {
  }
  close(efds[0]);
  if (en > 0)
    result.spawn_failed = true;
  return result;
}

// --- beta reduction -------------------------------------------------------

namespace {

Expr beta_reduce(const SynthFun &f, const Expr &body,
                 const std::vector<Expr> &args) {
  std::map<std::string, int> used;
  collect_symbols(body, used);
  for (const Expr &a : args)
    collect_symbols(a, used);

  // two-step substitution so parameters never capture each other's arguments
  std::vector<std::string> temps;
  Expr out = body;
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    std::string tmp = "?arg" + std::to_string(i);
    while (used.count(tmp))
      tmp += "_";
    used[tmp] = 1;
    temps.push_back(tmp);
    out = substitute(out, f.params[i].first,
                     mk_var(tmp, f.params[i].second));
  }
  for (std::size_t i = 0; i < f.params.size(); ++i)
    out = substitute(out, temps[i], args[i]);
  return out;
}

} // namespace

Expr inline_bindings(const Expr &e, const Problem &p,
                     const std::map<std::string, Expr> &bindings) {
  if (e.args().empty() && e.kind() != Kind::SynthApp)
    return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const Expr &a : e.args())
    args.push_back(inline_bindings(a, p, bindings));
  switch (e.kind()) {
  case Kind::SynthApp: {
    auto it = bindings.find(e.name());
    const SynthFun *f = p.find_fun(e.name());
    if (it == bindings.end() || !f)
      return mk_synth_app(e.name(), std::move(args), e.sort());
    return beta_reduce(*f, it->second, args);
  }
  case Kind::Apply:
    return mk_apply(e.op(), std::move(args));
  case Kind::Select:
    return mk_select(args[0], args[1]);
  case Kind::Store:
    return mk_store(args[0], args[1], args[2]);
  case Kind::Quant:
    return mk_quant(e.quant_kind(), e.binders(), args[0]);
  default:
    return e;
  }
}

// --- synthesis ------------------------------------------------------------

namespace {

// Re-check an external answer by finite evaluation before trusting it.
bool passes_internal_gate(const Problem &p,
                          const std::map<std::string, Expr> &defs) {
  Bindings bindings;
  for (const SynthFun &f : p.synth_funs) {
    auto it = defs.find(f.name);
    if (it == defs.end())
      return false;
    bindings[f.name] = FunDef{f.params, it->second};
  }
  std::int64_t len = 2;
  for (const Expr &c : p.constraints)
    if (auto mi = max_constant_index(c))
      len = std::max(len, *mi + 1);
  for (const Expr &c : p.constraints) {
    FiniteCheckConfig cfg;
    cfg.array_len = len;
    cfg.max_valuations = 200000;
    cfg.bindings = &bindings;
    try {
      if (finite_check(mk_not(c), cfg).sat())
        return false;
    } catch (const OracleTooLarge &) {
      // too large to gate; accept the solver's word
    }
  }
  return true;
}

} // namespace

SynthOutcome synthesize(const Problem &bounded,
                        const std::map<std::string, Grammar> &grammars,
                        std::chrono::milliseconds timeout,
                        const SynthBackend &backend) {
  if (const auto *internal = std::get_if<InternalSynth>(&backend)) {
    EnumLimits limits = internal->limits;
    if (timeout.count() > 0)
      limits.timeout = timeout;
    // grammar priority: explicit > declared on the function > default
    std::map<std::string, Grammar> full = grammars;
    for (const SynthFun &f : bounded.synth_funs) {
      if (full.count(f.name))
        continue;
      if (f.grammar)
        full.emplace(f.name, *f.grammar);
      else
        full.emplace(f.name,
                     build_template_grammar(
                         f, static_cast<int>(limits.array_len)));
    }
    return enumerate_candidates(bounded, full, limits);
  }

  const SolverSpec &spec = std::get<SolverSpec>(backend);
  std::chrono::milliseconds effective =
      timeout.count() > 0 ? timeout : spec.wall_timeout;

  Problem q = bounded;
  for (SynthFun &f : q.synth_funs) {
    auto it = grammars.find(f.name);
    if (it != grammars.end())
      f.grammar = it->second;
  }
  std::string file = write_temp_file(print_sygus(q, true), ".sl");
  RunResult rr = run_solver_process(spec.command, file, effective);
  unlink(file.c_str());

  if (rr.spawn_failed)
    throw BackendUnavailable("cannot spawn synthesis backend: " +
                             spec.command);
  if (rr.timed_out)
    return SynthTimedOut{};
  if (rr.exit_code != 0 && rr.output.empty())
    throw BackendUnavailable("synthesis backend exited with status " +
                             std::to_string(rr.exit_code) + " and no output");

  ParsedReply reply = parse_reply(rr.output, bounded);
  if (const auto *defs = std::get_if<ReplyDefineFuns>(&reply)) {
    if (!passes_internal_gate(bounded, defs->definitions))
      return SynthUnknown{"backend answer failed internal validation"};
    return SynthSolved{defs->definitions};
  }
  if (std::holds_alternative<ReplyUnsat>(reply))
    return SynthInfeasible{};
  if (std::holds_alternative<ReplyUnknown>(reply))
    return SynthUnknown{"backend returned unknown"};
  if (const auto *bad = std::get_if<ReplyMalformed>(&reply))
    return SynthUnknown{"unusable backend reply: " + bad->reason};
  return SynthUnknown{"unexpected backend reply"};
}

// --- verification ---------------------------------------------------------

VerifyOutcome verify(const Problem &p,
                     const std::map<std::string, Expr> &bindings,
                     const VerifyBackend &backend) {
  std::vector<Expr> inlined;
  inlined.reserve(p.constraints.size());
  for (const Expr &c : p.constraints)
    inlined.push_back(inline_bindings(c, p, bindings));
  Expr negated = mk_not(mk_and(inlined));

  if (const auto *internal = std::get_if<InternalVerify>(&backend)) {
    FiniteCheckResult r;
    try {
      r = finite_check(negated, internal->config);
    } catch (const OracleTooLarge &) {
      return VerifyUnknown{"bounded verification space too large"};
    }
    if (!r.sat())
      return VerifyValid{"internal-bounded"};
    return VerifyCounterExample{model_from_valuation(*r.witness)};
  }

  const SolverSpec &spec = std::get<SolverSpec>(backend);
  std::string text = print_smtlib_query(p.declared_vars, negated, "ALL");
  std::string file = write_temp_file(text, ".smt2");
  RunResult rr = run_solver_process(spec.command, file, spec.wall_timeout);
  unlink(file.c_str());

  if (rr.spawn_failed)
    throw BackendUnavailable("cannot spawn SMT backend: " + spec.command);
  if (rr.timed_out)
    return VerifyTimedOut{};
  if (rr.exit_code != 0 && rr.output.empty())
    throw BackendUnavailable("SMT backend exited with status " +
                             std::to_string(rr.exit_code) + " and no output");

  Problem decls_only;
  decls_only.declared_vars = p.declared_vars;
  ParsedReply reply = parse_reply(rr.output, decls_only);
  if (std::holds_alternative<ReplyUnsat>(reply))
    return VerifyValid{"external"};
  if (const auto *sat = std::get_if<ReplySat>(&reply)) {
    // validate the model by evaluating the negated conjunction under it
    Valuation v = valuation_from_model(sat->model);
    EvalContext ctx;
    ctx.array_len = model_footprint(sat->model);
    for (const Expr &c : p.constraints)
      if (auto mi = max_constant_index(c))
        ctx.array_len = std::max(ctx.array_len, *mi + 1);
    try {
      if (evaluate_bool(negated, v, ctx))
        return VerifyCounterExample{sat->model};
    } catch (const EvalError &) {
      // fall through: the model does not cover the footprint
    }
    return VerifyUnknown{"backend model failed validation"};
  }
  if (std::holds_alternative<ReplyUnknown>(reply))
    return VerifyUnknown{"backend returned unknown"};
  if (const auto *bad = std::get_if<ReplyMalformed>(&reply))
    return VerifyUnknown{"unusable backend reply: " + bad->reason};
  return VerifyUnknown{"unexpected backend reply"};
}

} // namespace synrg
