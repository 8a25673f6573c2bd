#include "recallm/cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "recallm/bench.hpp"
#include "recallm/engine.hpp"
#include "recallm/error.hpp"
#include "recallm/service.hpp"

namespace recallm {

using nlohmann::json;

namespace {

// Raised for bad command-line input detected after parsing.
struct UsageError : Error {
  using Error::Error;
};

std::string read_source(const std::string& source, std::istream& in) {
  std::ostringstream buffer;
  if (source == "-") {
    buffer << in.rdbuf();
  } else {
    std::ifstream file(source, std::ios::binary);
    if (!file) throw Error("cannot open " + source);
    buffer << file.rdbuf();
  }
  return buffer.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write " + path);
  file << content;
}

std::vector<unsigned> parse_checkpoints(const std::string& text) {
  std::vector<unsigned> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(part, &used);
      if (used != part.size() || v == 0) throw std::invalid_argument(part);
      out.push_back(static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw UsageError("invalid checkpoint '" + part + "'");
    }
  }
  if (out.empty()) throw UsageError("--checkpoints is empty");
  return out;
}

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Blocks SIGINT and SIGTERM for the lifetime of the object and calls
// on_signal from a watcher thread when one arrives.
class SignalWatcher {
 public:
  explicit SignalWatcher(std::function<void()> on_signal) {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, &previous_);
    thread_ = std::thread([this, on_signal = std::move(on_signal)] {
      timespec tick{0, 200'000'000};
      while (!done_) {
        if (sigtimedwait(&set_, nullptr, &tick) > 0) {
          on_signal();
          return;
        }
      }
    });
  }
  ~SignalWatcher() {
    done_ = true;
    thread_.join();
    pthread_sigmask(SIG_SETMASK, &previous_, nullptr);
  }

 private:
  sigset_t set_{};
  sigset_t previous_{};
  std::atomic<bool> done_{false};
  std::thread thread_;
};

void print_summary(const BenchResult& result, std::ostream& out) {
  out << "final counter: " << result.final_counter << "\n";
  out << "raw context exceeded at repetition: "
      << (result.raw_context_exceeded_at ? std::to_string(*result.raw_context_exceeded_at) : "never") << "\n";
  out << "evidence recall:\n";
  for (const auto& [key, acc] : summarize(result.records)) {
    out << "  " << to_string(key.system) << " rep " << key.checkpoint << " " << to_string(key.set) << ": "
        << acc.correct << "/" << acc.total << " (" << acc.percent() << "%)\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            const CliHooks& hooks) {
  CLI::App app{"Temporal concept-graph memory for chat models", "recallm"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string graph_path, vector_path;
  bool offline = false;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "Override a config key (key=value); repeatable")
      ->allow_extra_args(false);
  app.add_option("--graph", graph_path, "Graph snapshot path");
  app.add_option("--vectors", vector_path, "Vector snapshot path");
  app.add_flag("--offline", offline, "Use the offline providers even if an endpoint is configured");

  const std::vector<std::string> modes = {"graph", "vector", "hybrid", "retrieval-only"};

  auto* ingest = app.add_subcommand("ingest", "Ingest statements, one knowledge update per line");
  std::string ingest_source;
  bool ingest_document = false;
  std::string ingest_section;
  ingest->add_option("source", ingest_source, "File to read, or - for stdin")->required();
  ingest->add_flag("--document", ingest_document, "Treat the whole input as one knowledge update");
  ingest->add_option("--section", ingest_section, "Ingest one statement section of a benchmark fixture")
      ->check(CLI::IsMember({"INITIAL", "LOOP"}));

  auto* ask = app.add_subcommand("ask", "Answer a question from memory");
  std::string question;
  std::string ask_mode = "graph";
  ask->add_option("question", question, "The question")->required();
  ask->add_option("--mode", ask_mode, "graph | vector | hybrid | retrieval-only")->check(CLI::IsMember(modes));

  auto* repl = app.add_subcommand("repl", "Interactive loop: lines are updates, lines starting with ? are questions");
  std::string repl_mode = "graph";
  repl->add_option("--mode", repl_mode, "Answer mode for questions")->check(CLI::IsMember(modes));

  auto* bench = app.add_subcommand("bench", "Temporal benchmark");
  bench->require_subcommand(1);
  auto* bench_run = bench->add_subcommand("run", "Run the benchmark and write records");
  unsigned reps = 0;
  std::string checkpoints_text, dataset_path, records_out = "bench-records.jsonl";
  std::vector<std::string> systems;
  bool no_revision = false, no_long_range = false;
  std::size_t budget = 0;
  bench_run->add_option("--reps", reps, "Loop repetitions")->check(CLI::PositiveNumber);
  bench_run->add_option("--checkpoints", checkpoints_text, "Comma-separated repetitions to question at");
  bench_run->add_option("--systems", systems, "Systems to question")
      ->check(CLI::IsMember({"recallm", "vectordb", "hybrid", "raw"}));
  bench_run->add_option("--dataset", dataset_path, "Fixture path (default: bundled)")->check(CLI::ExistingFile);
  bench_run->add_option("--out", records_out, "Record file (JSON lines)");
  bench_run->add_option("--budget", budget, "Raw baseline context budget in characters");
  bench_run->add_flag("--no-revision", no_revision, "Disable context revision");
  bench_run->add_flag("--no-long-range", no_long_range, "Skip the long-range questions");

  auto* bench_export = bench->add_subcommand("export", "Write a blind grading sheet");
  std::string export_records, export_csv, export_mapping;
  std::uint64_t seed = 1;
  bench_export->add_option("--records", export_records, "Record file")->required()->check(CLI::ExistingFile);
  bench_export->add_option("--csv", export_csv, "Grading sheet to write")->required();
  bench_export->add_option("--mapping", export_mapping, "Sealed row mapping to write")->required();
  bench_export->add_option("--seed", seed, "Shuffle seed");

  auto* bench_grade = bench->add_subcommand("grade", "Join grades back and report accuracy");
  std::string grades_path, grade_mapping;
  bench_grade->add_option("--grades", grades_path, "Grades (JSON lines)")->required()->check(CLI::ExistingFile);
  bench_grade->add_option("--mapping", grade_mapping, "Row mapping")->required()->check(CLI::ExistingFile);

  auto* graph = app.add_subcommand("graph", "Graph operations");
  graph->require_subcommand(1);
  auto* graph_export = graph->add_subcommand("export", "Print the graph snapshot");
  std::string graph_out;
  graph_export->add_option("--out", graph_out, "Write to a file instead of stdout");

  auto* stats = app.add_subcommand("stats", "Print counters");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    AppConfig cfg;
    if (!config_path.empty()) cfg.apply_file(config_path);
    cfg.apply_env(hooks.getenv ? hooks.getenv : [](const char* name) -> const char* { return std::getenv(name); });
    try {
      cfg.apply_overrides(overrides);
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
    if (!graph_path.empty()) cfg.graph_path = graph_path;
    if (!vector_path.empty()) cfg.vector_path = vector_path;
    if (offline) cfg.provider_mode = ProviderMode::offline;
    if (!host.empty()) cfg.host = host;
    if (port >= 0) cfg.port = port;

    auto make_engine = [&] {
      if (hooks.chat || hooks.embedder) return std::make_unique<MemoryEngine>(cfg, hooks.chat, hooks.embedder, true);
      return std::make_unique<MemoryEngine>(cfg);
    };

    if (*ingest) {
      auto engine = make_engine();
      std::string text = read_source(ingest_source, in);
      std::size_t updates = 0;
      if (!ingest_section.empty()) {
        auto ds = parse_dataset(text, DatasetCheck::declared_only);
        for (const auto& s : ingest_section == "INITIAL" ? ds.initial : ds.loop) {
          engine->ingest(s);
          ++updates;
        }
      } else {
        updates = engine->ingest_text(text, !ingest_document).size();
      }
      engine->save();
      out << "ingested " << updates << " update" << (updates == 1 ? "" : "s") << ", counter "
          << engine->stats().counter << "\n";
      return kExitOk;
    }

    if (*ask) {
      auto engine = make_engine();
      out << engine->ask(question, parse_ask_mode(ask_mode)).dump(2, ' ', false, json::error_handler_t::replace)
          << "\n";
      return kExitOk;
    }

    if (*repl) {
      auto engine = make_engine();
      const AskMode mode = parse_ask_mode(repl_mode);
      std::string line;
      while (std::getline(in, line)) {
        std::string entry = trimmed(line);
        if (entry.empty()) continue;
        if (entry == ":quit" || entry == ":q") break;
        try {
          if (entry.front() == '?') {
            json trace = engine->ask(trimmed(std::string_view(entry).substr(1)), mode);
            if (trace.contains("answer") && trace["answer"].is_string()) {
              out << trace["answer"].get<std::string>() << "\n";
            } else if (trace.contains("error") && trace["error"].is_string()) {
              out << "error: " << trace["error"].get<std::string>() << "\n";
            } else {
              out << trace.value("assembled_context", std::string()) << "\n";
            }
          } else {
            out << "t=" << engine->ingest(entry).t_after << "\n";
          }
        } catch (const Error& e) {
          err << "error: " << e.what() << "\n";
        }
      }
      engine->save();
      return kExitOk;
    }

    if (*bench_run) {
      BenchConfig bc;
      bc.repetitions = reps ? reps : cfg.bench_repetitions;
      if (!checkpoints_text.empty()) {
        bc.checkpoints = parse_checkpoints(checkpoints_text);
      } else {
        bc.checkpoints.clear();
        for (unsigned c : cfg.bench_checkpoints) {
          if (c <= bc.repetitions) bc.checkpoints.push_back(c);
        }
        if (bc.checkpoints.empty()) bc.checkpoints.push_back(bc.repetitions);
      }
      for (unsigned c : bc.checkpoints) {
        if (c > bc.repetitions) throw UsageError("checkpoint " + std::to_string(c) + " is past --reps");
      }
      if (!systems.empty()) {
        bc.systems.clear();
        for (const auto& s : systems) bc.systems.insert(parse_system(s));
      }
      bc.long_range = !no_long_range;
      bc.retrieval = cfg.retrieval;
      bc.revision = cfg.revision;
      if (no_revision) bc.revision.enabled = false;
      bc.top_k = cfg.top_k;
      bc.raw_budget = budget ? budget : cfg.bench_raw_budget;

      std::shared_ptr<ChatProvider> chat = hooks.chat;
      std::shared_ptr<RemoteProvider> remote;
      std::unique_ptr<Reviser> reviser;
      if (!chat) {
        if (cfg.offline()) {
          chat = std::make_shared<ScriptedProvider>(extractive_answerer());
        } else {
          remote = std::make_shared<RemoteProvider>(cfg.remote());
          chat = remote;
          reviser = std::make_unique<ProviderReviser>(*remote);
          bc.discriminator = remote.get();
        }
      }
      bc.answerer = chat.get();
      bc.reviser = reviser.get();
      bc.provider_mode = cfg.offline() ? "offline" : "remote";
      bc.embedder = hooks.embedder ? hooks.embedder : std::make_shared<HashedNgramEmbedder>(cfg.embedding_dimension);

      const TemporalDataset ds = dataset_path.empty() ? bundled_dataset() : load_dataset(dataset_path);
      BenchResult result = run_temporal_bench(ds, bc);
      write_output(records_out, records_to_jsonl(result.records), out);
      print_summary(result, out);
      out << "records: " << records_out << "\n";
      return kExitOk;
    }

    if (*bench_export) {
      auto records = records_from_jsonl(read_source(export_records, in));
      std::size_t rows = export_blind_grading(records, export_csv, export_mapping, seed);
      out << "exported " << rows << " rows to " << export_csv << " (mapping: " << export_mapping << ")\n";
      return kExitOk;
    }

    if (*bench_grade) {
      for (const auto& [key, acc] : import_grades(grades_path, grade_mapping)) {
        out << to_string(key.system) << " rep " << key.checkpoint << " " << to_string(key.set) << ": "
            << acc.correct << "/" << acc.total << " (" << acc.percent() << "%)";
        if (acc.ungraded) out << ", " << acc.ungraded << " ungraded";
        out << "\n";
      }
      return kExitOk;
    }

    if (*graph_export) {
      auto engine = make_engine();
      write_output(graph_out, engine->export_graph(), out);
      return kExitOk;
    }

    if (*stats) {
      auto engine = make_engine();
      out << json(engine->stats()).dump() << "\n";
      return kExitOk;
    }

    if (*serve) {
      auto engine = make_engine();
      Service service(*engine);
      int bound = service.bind(cfg.host, cfg.port);
      out << "listening on " << cfg.host << ":" << bound << std::endl;
      {
        SignalWatcher watcher([&service] { service.stop(); });
        service.run();
      }
      engine->save();
      out << "snapshots saved" << std::endl;
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace recallm
