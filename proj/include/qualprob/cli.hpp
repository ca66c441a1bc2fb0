#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qualprob/oracle.hpp"
#include "qualprob/problem_file.hpp"
#include "qualprob/report.hpp"
#include "qualprob/server.hpp"

namespace qualprob::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kCap = 3 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::CapExceeded:
    case ErrorCode::SizeCapExceeded:
    case ErrorCode::BudgetExceeded: return kCap;
    case ErrorCode::EmptyCredalSet:
    case ErrorCode::ZeroProbabilityConditioner:
    case ErrorCode::EmptyDomain: return kFail;
    default: return kUsage;
  }
}

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string journal_dir;
  std::size_t max_worlds = 10;
  long query_budget_ms = 5000;
  std::string static_dir;
};

namespace detail {

struct Run {
  std::ostream& out;
  std::ostream& err;
  bool json = false;

  int emit(Json doc, const std::string& text, int code) {
    if (json) {
      Json full{{"schema", kSchemaVersion}};
      full.update(doc);
      out << full.dump(2) << "\n";
    } else {
      out << text;
    }
    return code;
  }

  int fail(const Error& e) {
    if (json) {
      Json doc{{"schema", kSchemaVersion}};
      doc.update(report::error(e));
      out << doc.dump(2) << "\n";
    } else {
      err << "error: " << e.what() << "\n";
    }
    return exit_code_for(e.code());
  }
};

inline std::string display_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

// Sentence from a command-line option; errors are placed as option:1:column.
inline Event option_event(const std::string& option, const std::string& text, const SpaceRef& space) {
  try {
    return event_of(text, space);
  } catch (const Error& e) {
    auto column = e.offset().value_or(0) + 1;
    throw Error(e.code(), option + ":1:" + std::to_string(column) + ": " + e.what(), e.offset());
  }
}

inline PartialOrdering judgments_of(const ProblemFile& pf) {
  return pf.partial ? *pf.partial : adjacent_judgments(*pf.complete);
}

inline std::string ordering_line(const CompleteOrdering& o) {
  std::string s;
  bool first_class = true;
  for (const auto& cls : o.classes()) {
    if (!first_class) s += " < ";
    first_class = false;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (i) s += " = ";
      s += format_event(Event(o.space(), cls[i]));
    }
  }
  return s;
}

inline int check(Run& run, const ProblemFile& pf, bool allow_sampling) {
  CheckOptions opts;
  opts.allow_sampling = allow_sampling;
  std::string text = "file: " + display_name(pf.name) + "\n";
  Json doc{{"command", "check"}, {"file", display_name(pf.name)}};
  bool pass = true;
  if (pf.complete) {
    auto r = check_unconditional(*pf.complete, pf.certain_true, pf.certain_false, opts);
    pass = r.all_pass();
    text += "ordering: complete, " + std::to_string(pf.space->world_count()) + " worlds, " +
            std::to_string(pf.complete->class_count()) + " classes\n" + report::verdicts_text(r);
    doc["kind"] = "complete";
    doc["unconditional"] = report::axioms(r);
    if (pf.conditional) {
      auto c = check_conditional(*pf.conditional, opts);
      pass = pass && c.all_pass();
      text += "conditional:\n" + report::verdicts_text(c);
      doc["conditional"] = report::conditional(c);
    }
  } else {
    auto r = check_partial(*pf.partial);
    pass = r.all_pass();
    text += "ordering: partial, " + std::to_string(pf.partial->judgments().size()) + " judgments\n" +
            report::verdicts_text(r);
    if (r.coverage) text += "coverage: " + r.coverage->str() + "\n";
    doc["kind"] = "partial";
    doc["partial"] = report::axioms(r);
  }
  text += std::string("result: ") + (pass ? "PASS" : "FAIL") + "\n";
  doc["pass"] = pass;
  return run.emit(doc, text, pass ? kPass : kFail);
}

inline int realize(Run& run, const ProblemFile& pf) {
  auto out = pf.complete ? realize_complete(*pf.complete) : realize_partial(*pf.partial);
  bool ok = std::holds_alternative<Realization>(out);
  Json doc{{"command", "realize"}, {"file", display_name(pf.name)}, {"realization", report::realization(out)}};
  return run.emit(doc, report::realization_text(out), ok ? kPass : kFail);
}

inline int entail(Run& run, const ProblemFile& pf, const std::string& lhs, const std::string& rhs) {
  auto a = option_event("--lhs", lhs, pf.space);
  auto b = option_event("--rhs", rhs, pf.space);
  auto e = entails(CredalSet(judgments_of(pf)), a, b);
  Json doc{{"command", "entail"},
           {"file", display_name(pf.name)},
           {"lhs", report::event(a)},
           {"rhs", report::event(b)},
           {"entailment", report::entailment(e)}};
  return run.emit(doc, report::entailment_text(e), e.always ? kPass : kFail);
}

inline int bounds(Run& run, const ProblemFile& pf, const std::string& event, const std::optional<std::string>& given) {
  auto a = option_event("--event", event, pf.space);
  CredalSet cs(judgments_of(pf));
  Json doc{{"command", "bounds"}, {"file", display_name(pf.name)}, {"event", report::event(a)}};
  Bounds b;
  if (given) {
    auto c = option_event("--given", *given, pf.space);
    b = cond_bounds(cs, a, c);
    doc["given"] = report::event(c);
  } else {
    b = qualprob::bounds(cs, a);
  }
  doc["bounds"] = report::bounds(b);
  return run.emit(doc, report::bounds_text(b), kPass);
}

inline int enumerate(Run& run, std::size_t worlds) {
  if (worlds == 0) throw Error(ErrorCode::InvalidSpace, "--worlds must be positive");
  if (worlds > 3) throw Error(ErrorCode::CapExceeded, "enumeration is limited to 3 worlds");
  auto result = enumerate_qualitative_probabilities(Space::numbered_worlds(worlds));
  std::string text = "worlds: " + std::to_string(worlds) + "\norderings: " + std::to_string(result.total_count) +
                     "\nall realizable: " + (result.all_realizable ? "yes" : "no") + "\n";
  Json list = Json::array();
  for (const auto& o : result.orderings) {
    auto line = ordering_line(o);
    text += "  " + line + "\n";
    list.push_back(line);
  }
  Json doc{{"command", "enumerate"},
           {"worlds", worlds},
           {"count", result.total_count},
           {"all_realizable", result.all_realizable},
           {"orderings", list}};
  return run.emit(doc, text, result.all_realizable ? kPass : kFail);
}

inline int serve(Run& run, const ServeOptions& opts) {
  SessionConfig config;
  config.journal_dir = opts.journal_dir;
  config.max_worlds = opts.max_worlds;
  config.query_budget = std::chrono::milliseconds(opts.query_budget_ms);
  SessionService service(config);
  auto loaded = service.load_journals();
  HttpFrontEnd front(service, opts.static_dir);
  run.err << "qualprob: serving on " << opts.host << ":" << opts.port << " (" << loaded << " sessions restored)\n";
  if (!front.listen(opts.host, opts.port)) {
    throw Error(ErrorCode::Io, "cannot listen on " + opts.host + ":" + std::to_string(opts.port));
  }
  return kPass;
}

}  // namespace detail

/// Runs one command line. `args` excludes the program name.
inline int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Comparative-belief toolkit: axiom checks and exact realization over finite spaces.", "qualprob"};
  app.require_subcommand(1);
  std::string format = "text";
  std::string file, lhs, rhs, event;
  std::optional<std::string> given;
  bool allow_sampling = false;
  std::size_t worlds = 0;
  ServeOptions serve_opts;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  };
  auto add_file = [&](CLI::App* sub) { sub->add_option("FILE", file, "Problem file")->required(); };

  auto* check = app.add_subcommand("check", "Check the axioms against an ordering");
  add_file(check);
  add_format(check);
  check->add_flag("--allow-sampling", allow_sampling, "Sample tuples above the exhaustive cap");

  auto* realize = app.add_subcommand("realize", "Find an agreeing distribution or a certificate");
  add_file(realize);
  add_format(realize);

  auto* entail = app.add_subcommand("entail", "Whether every honoring distribution has p(lhs) >= p(rhs)");
  add_file(entail);
  add_format(entail);
  entail->add_option("--lhs", lhs, "Sentence")->required();
  entail->add_option("--rhs", rhs, "Sentence")->required();

  auto* bounds = app.add_subcommand("bounds", "Probability interval of an event over the credal set");
  add_file(bounds);
  add_format(bounds);
  bounds->add_option("--event", event, "Sentence")->required();
  bounds->add_option("--given", given, "Conditioning sentence");

  auto* enumerate = app.add_subcommand("enumerate", "List every qualitative probability on N worlds");
  add_format(enumerate);
  enumerate->add_option("--worlds", worlds, "World count (at most 3)")->required();

  auto* serve = app.add_subcommand("serve", "Run the elicitation session service");
  serve->add_option("--host", serve_opts.host)->envname("QUALPROB_HOST");
  serve->add_option("--port", serve_opts.port)->envname("QUALPROB_PORT");
  serve->add_option("--journal-dir", serve_opts.journal_dir)->envname("QUALPROB_JOURNAL_DIR");
  serve->add_option("--max-worlds", serve_opts.max_worlds)->envname("QUALPROB_MAX_WORLDS");
  serve->add_option("--query-budget-ms", serve_opts.query_budget_ms, "Per-query budget; 0 disables")
      ->envname("QUALPROB_QUERY_BUDGET_MS");
  serve->add_option("--static-dir", serve_opts.static_dir, "Serve console assets from here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  detail::Run run{out, err, format == "json"};
  try {
    if (*enumerate) return detail::enumerate(run, worlds);
    if (*serve) return detail::serve(run, serve_opts);
    auto pf = load_problem(file);
    if (*check) return detail::check(run, pf, allow_sampling);
    if (*realize) return detail::realize(run, pf);
    if (*entail) return detail::entail(run, pf, lhs, rhs);
    return detail::bounds(run, pf, event, given);
  } catch (const Error& e) {
    return run.fail(e);
  }
}

}  // namespace qualprob::cli
