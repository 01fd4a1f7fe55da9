#pragma once

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "siminf/siminf.hpp"

namespace siminf::cli {

// Exit codes: 0 success / affirmative, 1 negative (countermodel, incoherent,
// impossible target), 2 validation failure, 3 resource or search bounds,
// 4 usage error.

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::resource_budget:
    case ErrorKind::bounds_exhausted:
      return 3;
    case ErrorKind::usage:
      return 4;
    default:
      return 2;
  }
}

struct CommonOptions {
  int max_domain = 3;
  std::uint64_t budget = 20'000'000;
  bool json = false;
  std::vector<std::string> declare;

  EntailmentOptions entailment() const {
    EntailmentOptions opts;
    opts.max_domain = max_domain;
    opts.budget = budget;
    return opts;
  }
};

inline void add_common(CLI::App* cmd, CommonOptions& common, bool with_bounds = true) {
  cmd->add_flag("--json", common.json, "emit a machine-readable run report");
  if (with_bounds) {
    cmd->add_option("--max-domain", common.max_domain,
                    "largest domain size enumerated for entailment")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--budget", common.budget,
                    "candidate-structure budget for entailment");
    cmd->add_option("--declare", common.declare,
                    "declare extra symbols NAME/ARITY for formula parsing")
        ->take_all();
  }
}

inline Signature extended_signature(Signature sig,
                                    const std::vector<std::string>& declares) {
  for (const auto& d : declares) {
    auto slash = d.rfind('/');
    if (slash == std::string::npos)
      throw Error(ErrorKind::usage, "--declare expects NAME/ARITY, got '" + d + "'");
    int arity = 0;
    try {
      arity = std::stoi(d.substr(slash + 1));
    } catch (...) {
      throw Error(ErrorKind::usage, "bad arity in --declare '" + d + "'");
    }
    sig.add({d.substr(0, slash), arity});
  }
  return sig;
}

/// Signature visible to --formula / --premises: database symbols, plus any
/// the script introduces, plus --declare'd ones.
inline Signature script_signature(const Database& db,
                                  const std::vector<UpdateOp>& ops,
                                  const std::vector<std::string>& declares) {
  Signature sig = db.structure.signature();
  for (const auto& op : ops)
    std::visit([&](const auto& spec) { sig.add(spec.symbol); }, op);
  return extended_signature(std::move(sig), declares);
}

struct CliStreams {
  std::ostream& out;
  std::ostream& err;
};

inline int emit_error(const CliStreams& io, bool json, const std::string& command,
                      const Error& e) {
  if (json) {
    Json j{{"schema_version", 1},
           {"command", command},
           {"error", Json{{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    if (e.step() >= 0) j["error"]["step"] = e.step();
    io.out << j.dump(2) << "\n";
  } else {
    io.err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
  }
  return exit_code_for(e.kind());
}

inline void print_fixture_report(const FixtureReport& report, const CliStreams& io) {
  for (const auto& row : report.rows) {
    const char* tag = row.status == FixtureRow::Status::match ? "[ ok ]"
                      : row.status == FixtureRow::Status::deviation
                          ? "[deviation]"
                          : "[MISMATCH]";
    io.out << tag << " " << row.id << " — " << row.description << "\n";
    io.out << "         documented: " << row.expected
           << "    computed: " << row.computed << "\n";
    if (!row.note.empty()) io.out << "         note: " << row.note << "\n";
    if (row.status != FixtureRow::Status::match)
      for (const auto& line : row.trace) io.out << "           " << line << "\n";
  }
  int mismatches = 0;
  for (const auto& r : report.rows)
    if (r.status == FixtureRow::Status::mismatch) ++mismatches;
  io.out << report.rows.size() << " checks, " << report.deviations()
         << " documented deviation(s), " << mismatches << " mismatch(es)\n";
}

inline int run_cli(std::vector<std::string> args, std::ostream& out_stream,
                   std::ostream& err_stream) {
  CliStreams io{out_stream, err_stream};
  CLI::App app{"semantic informativity toolkit for finite first-order databases"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "validate a database against its theory");
  std::string check_db;
  CommonOptions check_opts;
  check->add_option("--db", check_db, "database file")->required();
  add_common(check, check_opts, false);

  // update
  auto* update = app.add_subcommand("update", "apply an update script");
  std::string update_db, update_script, update_out, update_trace;
  CommonOptions update_opts;
  update->add_option("--db", update_db, "database file")->required();
  update->add_option("--script", update_script, "update script")->required();
  update->add_option("--out", update_out, "write the final database here");
  update->add_option("--trace", update_trace,
                     "directory for per-step database snapshots");
  add_common(update, update_opts, false);

  // entails
  auto* entails = app.add_subcommand("entails",
                                     "bounded entailment from the database theory");
  std::string entails_db, entails_formula;
  CommonOptions entails_opts;
  entails->add_option("--db", entails_db, "database file")->required();
  entails->add_option("--formula", entails_formula, "goal sentence")->required();
  add_common(entails, entails_opts);

  // metric commands share options
  struct MetricArgs {
    std::string db, script, formula, premises;
    CommonOptions common;
  };
  MetricArgs coherency_args, relevancy_args, informativity_args;
  auto add_metric = [&](const char* name, const char* help, MetricArgs& a,
                        bool premises) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--db", a.db, "database file")->required();
    cmd->add_option("--script", a.script,
                    "update script (omitted: the base database alone)");
    cmd->add_option("--formula", a.formula, "conclusion sentence")->required();
    if (premises)
      cmd->add_option("--premises", a.premises, "premise sentences, ';'-separated");
    add_common(cmd, a.common);
    return cmd;
  };
  add_metric("coherency", "coherency of an update with a sentence", coherency_args,
             false);
  add_metric("relevancy", "relevancy of a deduction under an update", relevancy_args,
             true);
  add_metric("informativity", "semantic informativity of a deduction or sentence",
             informativity_args, true);

  // plan
  auto* plan = app.add_subcommand("plan",
                                  "search a minimal update making a sentence coherent");
  std::string plan_db, plan_formula, plan_out;
  int plan_max_steps = 2, plan_max_fresh = 2, plan_max_branch = 5000;
  CommonOptions plan_opts;
  plan->add_option("--db", plan_db, "database file")->required();
  plan->add_option("--formula", plan_formula, "target sentence")->required();
  plan->add_option("--max-steps", plan_max_steps, "step bound")->check(CLI::PositiveNumber);
  plan->add_option("--max-fresh", plan_max_fresh, "fresh-element bound");
  plan->add_option("--max-branch", plan_max_branch, "per-state candidate cap");
  plan->add_option("--out", plan_out, "write the plan script here");
  add_common(plan, plan_opts);

  // rank
  auto* rank = app.add_subcommand("rank", "rank candidate deductions by informativity");
  std::string rank_db, rank_file;
  int rank_max_steps = 2, rank_max_fresh = 2, rank_max_branch = 5000;
  CommonOptions rank_opts;
  rank->add_option("--db", rank_db, "database file")->required();
  rank->add_option("--deductions", rank_file, "deduction list file")->required();
  rank->add_option("--max-steps", rank_max_steps, "step bound per candidate");
  rank->add_option("--max-fresh", rank_max_fresh, "fresh-element bound");
  rank->add_option("--max-branch", rank_max_branch, "per-state candidate cap");
  add_common(rank, rank_opts);

  // verify-paper
  auto* verify = app.add_subcommand(
      "verify-paper", "re-run the bundled worked examples against their documented values");
  CommonOptions verify_opts;
  add_common(verify, verify_opts);

  std::vector<const char*> argv;
  argv.push_back("siminf");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    io.err << "usage error: " << e.what() << "\n";
    return 4;
  }

  std::string command = app.get_subcommands().front()->get_name();
  bool json_mode = false;
  try {
    if (check->parsed()) {
      json_mode = check_opts.json;
      std::string text = read_file(check_db);
      Database db = parse_database_text(text, false);
      CorrectnessReport report = check_correctness(db);
      RunReport run;
      run.command = "check";
      run.inputs = {{check_db, text}};
      Json failing = Json::array();
      for (const auto& f : report.failing) failing.push_back(to_string(f));
      run.result = Json{{"correct", report.ok}, {"failing", failing}};
      if (check_opts.json) {
        io.out << run.to_json().dump(2) << "\n";
      } else if (report.ok) {
        io.out << "correct: every theory sentence holds\n";
      } else {
        io.out << "incorrect: failing sentence(s):\n";
        for (const auto& f : report.failing) io.out << "  " << to_string(f) << "\n";
      }
      return report.ok ? 0 : 2;
    }

    if (update->parsed()) {
      json_mode = update_opts.json;
      std::string db_text = read_file(update_db);
      std::string script_text = read_file(update_script);
      Database db = parse_database_text(db_text);
      Update u = build_update(db, parse_update_script(script_text));
      if (!update_out.empty())
        write_file(update_out, save_database_text(u.final_database()));
      if (!update_trace.empty()) {
        std::filesystem::create_directories(update_trace);
        for (std::size_t i = 0; i < u.databases().size(); ++i)
          write_file(update_trace + "/D" + std::to_string(i + 1) + ".db",
                     save_database_text(u.databases()[i]));
      }
      RunReport run;
      run.command = "update";
      run.inputs = {{update_db, db_text}, {update_script, script_text}};
      run.result = Json{{"steps", u.steps()},
                        {"final_database", structure_json(u.final_database().structure)}};
      run.warnings = update_warnings_json(u);
      if (update_opts.json) {
        io.out << run.to_json().dump(2) << "\n";
      } else {
        io.out << "applied " << u.steps() << " step(s)\n";
        for (const auto& w : u.warnings()) {
          io.out << "warning: after step " << w.step << " ("
                 << op_to_string(u.ops()[w.step - 1])
                 << ") these theory sentences do not hold:\n";
          for (const auto& f : w.unsatisfied) io.out << "  " << to_string(f) << "\n";
        }
        if (update_out.empty()) io.out << save_database_text(u.final_database());
      }
      return 0;
    }

    if (entails->parsed()) {
      json_mode = entails_opts.json;
      std::string db_text = read_file(entails_db);
      Database db = parse_database_text(db_text);
      Signature sig =
          extended_signature(db.structure.signature(), entails_opts.declare);
      FormulaPtr goal = parse_sentence(entails_formula, sig);
      EntailmentVerdict v = entails_bounded(db.theory, goal, entails_opts.entailment());
      RunReport run;
      run.command = "entails";
      run.inputs = {{entails_db, db_text}};
      run.bounds = entails_opts.entailment();
      run.result = Json{{"formula", to_string(goal)},
                        {"outcome", v.entailed() ? "entailed_up_to_bound"
                                                 : "countermodel_found"},
                        {"bound", v.bound},
                        {"structures_checked", v.structures_checked}};
      if (v.witness) run.result["countermodel"] = structure_json(*v.witness);
      if (entails_opts.json) {
        io.out << run.to_json().dump(2) << "\n";
      } else if (v.entailed()) {
        io.out << "entailed up to domain size " << v.bound << " ("
               << v.structures_checked << " structures checked)\n";
      } else {
        io.out << "countermodel found:\n" << save_structure_text(*v.witness);
      }
      return v.entailed() ? 0 : 1;
    }

    for (auto* entry : {&coherency_args, &relevancy_args, &informativity_args}) {
      MetricArgs& a = *entry;
      bool is_coherency = entry == &coherency_args;
      bool is_relevancy = entry == &relevancy_args;
      CLI::App* cmd = is_coherency ? app.get_subcommand("coherency")
                      : is_relevancy ? app.get_subcommand("relevancy")
                                     : app.get_subcommand("informativity");
      if (!cmd->parsed()) continue;
      json_mode = a.common.json;
      std::string db_text = read_file(a.db);
      Database db = parse_database_text(db_text);
      RunReport run;
      run.command = command;
      run.inputs = {{a.db, db_text}};
      std::vector<UpdateOp> ops;
      if (!a.script.empty()) {
        std::string script_text = read_file(a.script);
        run.inputs.emplace_back(a.script, script_text);
        ops = parse_update_script(script_text);
      }
      Update u = build_update(db, ops);
      run.warnings = update_warnings_json(u);
      run.bounds = a.common.entailment();
      Signature sig = script_signature(db, ops, a.common.declare);
      FormulaPtr conclusion = parse_sentence(a.formula, sig);
      std::vector<FormulaPtr> premises;
      if (!a.premises.empty())
        for (const auto& p : detail::split_on(a.premises, ';'))
          premises.push_back(parse_sentence(p, sig));
      EntailmentOptions opts = a.common.entailment();

      CoherencyResult h = coherency(u, conclusion);
      Rational value = h.value;
      std::vector<FormulaPtr> relevant;
      const std::vector<FormulaPtr>* relevant_ptr = nullptr;
      if (!is_coherency) {
        Deduction d = premises.empty() && !is_relevancy
                          ? Deduction::make({conclusion}, conclusion)
                          : Deduction::make(premises, conclusion);
        RelevantPremisesResult rp = relevant_premises(u, d, opts);
        if (rp.defined) {
          relevant = rp.premises;
          relevant_ptr = &relevant;
        }
        value = is_relevancy ? relevancy(u, d, opts) : informativity(u, d, opts);
        if (!d.premises.empty()) {
          EntailmentVerdict validity = entails_bounded(d.premises, d.conclusion, opts);
          if (!validity.entailed())
            run.warnings.push_back(
                Json{{"message", "deduction validity refuted: premises do not "
                                 "entail the conclusion up to domain size " +
                                     std::to_string(validity.bound)}});
        }
      }
      run.result = metric_result_json(value, h, relevant_ptr, opts.max_domain);
      if (a.common.json) {
        io.out << run.to_json().dump(2) << "\n";
      } else {
        io.out << command << " = " << to_fraction_string(value) << " ("
               << to_double(value) << ")\n";
        if (h.first_true)
          io.out << "first true at database " << *h.first_true << " of "
                 << u.databases().size() << "\n";
        else
          io.out << "not coherent: false in the final database\n";
        if (relevant_ptr) {
          io.out << "relevant premises:";
          if (relevant.empty()) io.out << " (none)";
          for (const auto& p : relevant) io.out << " " << to_string(p) << ";";
          io.out << "\n";
        }
        for (const auto& w : run.warnings)
          if (w.contains("message"))
            io.out << "warning: " << w["message"].get<std::string>() << "\n";
          else
            io.out << "warning: step " << w["step"] << " leaves theory sentences "
                   << w["unsatisfied"].dump() << "\n";
      }
      return 0;
    }

    if (plan->parsed()) {
      json_mode = plan_opts.json;
      std::string db_text = read_file(plan_db);
      Database db = parse_database_text(db_text);
      Signature sig = extended_signature(db.structure.signature(), plan_opts.declare);
      FormulaPtr target = parse_sentence(plan_formula, sig);
      PlanBounds bounds;
      bounds.max_steps = plan_max_steps;
      bounds.max_fresh_elements = plan_max_fresh;
      bounds.max_branch = plan_max_branch;
      bounds.entailment = plan_opts.entailment();
      PlanResult result = plan_coherent_update(db, target, bounds);
      RunReport run;
      run.command = "plan";
      run.inputs = {{plan_db, db_text}};
      run.bounds = bounds.entailment;
      if (result.plan) {
        const Plan& p = *result.plan;
        Json steps = Json::array();
        for (const auto& op : p.update.ops()) steps.push_back(op_to_string(op));
        run.result = Json{{"found", true},
                          {"steps", p.steps_used},
                          {"script", steps},
                          {"coherency", rational_json(p.coherency_achieved)},
                          {"final_database",
                           structure_json(p.update.final_database().structure)}};
        run.warnings = update_warnings_json(p.update);
        if (!plan_out.empty())
          write_file(plan_out, save_update_script(p.update.ops()));
        if (plan_opts.json) {
          io.out << run.to_json().dump(2) << "\n";
        } else {
          io.out << "plan with " << p.steps_used << " step(s), coherency "
                 << to_fraction_string(p.coherency_achieved) << ":\n";
          io.out << save_update_script(p.update.ops());
        }
        return 0;
      }
      bool impossible = result.reason == PlanFailureReason::impossible_up_to_bound;
      run.result = Json{{"found", false},
                        {"reason", impossible ? "impossible_up_to_bound"
                                              : "bounds_exhausted"},
                        {"note", result.note}};
      if (plan_opts.json)
        io.out << run.to_json().dump(2) << "\n";
      else
        io.out << (impossible ? "impossible: " : "bounds exhausted: ")
               << result.note << "\n";
      return impossible ? 1 : 3;
    }

    if (rank->parsed()) {
      json_mode = rank_opts.json;
      std::string db_text = read_file(rank_db);
      std::string list_text = read_file(rank_file);
      Database db = parse_database_text(db_text);
      Signature sig = extended_signature(db.structure.signature(), rank_opts.declare);
      std::vector<Deduction> candidates = parse_deductions(list_text, sig);
      PlanBounds bounds;
      bounds.max_steps = rank_max_steps;
      bounds.max_fresh_elements = rank_max_fresh;
      bounds.max_branch = rank_max_branch;
      bounds.entailment = rank_opts.entailment();
      std::vector<RankedCandidate> ranked = rank_deductions(db, candidates, bounds);
      RunReport run;
      run.command = "rank";
      run.inputs = {{rank_db, db_text}, {rank_file, list_text}};
      run.bounds = bounds.entailment;
      Json rows = Json::array();
      for (const auto& rc : ranked) {
        Json row{{"deduction", deduction_to_string(rc.deduction)},
                 {"ranked", rc.ranked}};
        if (rc.ranked) {
          row["informativity"] = rational_json(rc.informativity_value);
          row["relevancy"] = rational_json(rc.relevancy_value);
          row["coherency"] = rational_json(rc.coherency_value);
          row["steps"] = rc.plan->steps_used;
          row["results"] = rc.results_count;
          Json script = Json::array();
          for (const auto& op : rc.plan->update.ops())
            script.push_back(op_to_string(op));
          row["script"] = std::move(script);
        } else {
          row["note"] = rc.note;
        }
        rows.push_back(std::move(row));
      }
      run.result = Json{{"candidates", std::move(rows)}};
      if (rank_opts.json) {
        io.out << run.to_json().dump(2) << "\n";
      } else {
        int position = 0;
        for (const auto& rc : ranked) {
          if (rc.ranked) {
            io.out << "#" << ++position << " I = "
                   << to_fraction_string(rc.informativity_value) << ", steps = "
                   << rc.plan->steps_used << ", results = " << rc.results_count
                   << " — " << deduction_to_string(rc.deduction) << "\n";
          } else {
            io.out << "(skipped: " << rc.note << ") — "
                   << deduction_to_string(rc.deduction) << "\n";
          }
        }
      }
      return 0;
    }

    if (verify->parsed()) {
      json_mode = verify_opts.json;
      FixtureReport report = run_fixture_suite(verify_opts.entailment());
      if (verify_opts.json) {
        Json rows = Json::array();
        for (const auto& row : report.rows) {
          rows.push_back(Json{{"id", row.id},
                              {"description", row.description},
                              {"documented", row.expected},
                              {"computed", row.computed},
                              {"status", row.status == FixtureRow::Status::match
                                             ? "match"
                                             : row.status == FixtureRow::Status::deviation
                                                   ? "deviation"
                                                   : "mismatch"},
                              {"note", row.note},
                              {"trace", row.trace}});
        }
        Json j{{"schema_version", 1},
               {"command", "verify-paper"},
               {"inputs", Json::array()},
               {"bounds", Json{{"max_domain", verify_opts.max_domain},
                               {"budget", verify_opts.budget}}},
               {"result", Json{{"ok", report.ok()},
                               {"deviations", report.deviations()},
                               {"rows", std::move(rows)}}},
               {"warnings", Json::array()}};
        io.out << j.dump(2) << "\n";
      } else {
        print_fixture_report(report, io);
      }
      return report.ok() ? 0 : 2;
    }
  } catch (const Error& e) {
    return emit_error(io, json_mode, command, e);
  }
  io.err << "usage error: no command handled\n";
  return 4;
}

}  // namespace siminf::cli
