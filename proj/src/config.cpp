#include "recallm/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "recallm/error.hpp"

namespace recallm {

namespace {

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ArgumentError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    double out = std::stod(std::string(value), &used);
    if (used == value.size()) return out;
  } catch (const std::exception&) {
  }
  throw ArgumentError("invalid value '" + std::string(value) + "' for " + std::string(key));
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ArgumentError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

template <typename T>
T positive(std::string_view key, T v) {
  if (v <= 0) throw ArgumentError(std::string(key) + " must be positive");
  return v;
}

}  // namespace

std::string_view to_string(ProviderMode mode) {
  switch (mode) {
    case ProviderMode::automatic: return "auto";
    case ProviderMode::offline: return "offline";
    case ProviderMode::remote: return "remote";
  }
  return "auto";
}

const std::vector<std::string>& AppConfig::keys() {
  static const std::vector<std::string> all = {
      "store.graph",         "store.vectors",         "retrieval.max_concepts", "retrieval.max_distance",
      "retrieval.alpha",     "retrieval.window",      "retrieval.top_k",        "revision.enabled",
      "revision.merges",     "revision.max_chars",    "provider.mode",          "provider.base_url",
      "provider.api_key",    "provider.model",        "provider.embedding_model", "provider.max_attempts",
      "embedder.mode",       "embedder.dimension",    "bench.reps",             "bench.checkpoints",
      "bench.raw_budget",    "server.host",           "server.port",
  };
  return all;
}

void AppConfig::set(std::string_view key_view, std::string_view raw_value) {
  const std::string key(key_view);
  const std::string value = trimmed(raw_value);
  if (key == "store.graph") {
    graph_path = value;
  } else if (key == "store.vectors") {
    vector_path = value;
  } else if (key == "retrieval.max_concepts") {
    retrieval.max_prompt_concepts = positive(key, parse_number<std::size_t>(key, value));
  } else if (key == "retrieval.max_distance") {
    retrieval.max_distance = positive(key, parse_number<unsigned>(key, value));
  } else if (key == "retrieval.alpha") {
    retrieval.alpha = parse_double(key, value);
  } else if (key == "retrieval.window") {
    if (value == "unlimited" || value == "none") {
      retrieval.temporal_window.reset();
    } else {
      retrieval.temporal_window = parse_number<Timestep>(key, value);
    }
  } else if (key == "retrieval.top_k") {
    top_k = positive(key, parse_number<std::size_t>(key, value));
  } else if (key == "revision.enabled") {
    revision.enabled = parse_bool(key, value);
  } else if (key == "revision.merges") {
    revision.merges_per_revision = parse_number<std::uint64_t>(key, value);
  } else if (key == "revision.max_chars") {
    revision.max_context_chars = positive(key, parse_number<std::size_t>(key, value));
  } else if (key == "provider.mode") {
    if (value == "auto") provider_mode = ProviderMode::automatic;
    else if (value == "offline") provider_mode = ProviderMode::offline;
    else if (value == "remote") provider_mode = ProviderMode::remote;
    else throw ArgumentError("provider.mode must be auto, offline or remote");
  } else if (key == "provider.base_url") {
    api_base = value;
  } else if (key == "provider.api_key") {
    api_key = value;
  } else if (key == "provider.model") {
    model = value;
  } else if (key == "provider.embedding_model") {
    embedding_model = value;
  } else if (key == "provider.max_attempts") {
    max_attempts = positive(key, parse_number<int>(key, value));
  } else if (key == "embedder.mode") {
    if (value == "hashed") embedder = EmbedderMode::hashed;
    else if (value == "remote") embedder = EmbedderMode::remote;
    else throw ArgumentError("embedder.mode must be hashed or remote");
  } else if (key == "embedder.dimension") {
    embedding_dimension = positive(key, parse_number<std::size_t>(key, value));
  } else if (key == "bench.reps") {
    bench_repetitions = positive(key, parse_number<unsigned>(key, value));
  } else if (key == "bench.checkpoints") {
    std::vector<unsigned> parsed;
    std::stringstream in(value);
    std::string part;
    while (std::getline(in, part, ',')) parsed.push_back(positive(key, parse_number<unsigned>(key, trimmed(part))));
    if (parsed.empty()) throw ArgumentError("bench.checkpoints is empty");
    bench_checkpoints = std::move(parsed);
  } else if (key == "bench.raw_budget") {
    bench_raw_budget = positive(key, parse_number<std::size_t>(key, value));
  } else if (key == "server.host") {
    host = value;
  } else if (key == "server.port") {
    port = parse_number<int>(key, value);
    if (port < 0 || port > 65535) throw ArgumentError("server.port out of range");
  } else {
    throw ArgumentError("unknown config key '" + key + "'");
  }
}

void AppConfig::apply_file_text(std::string_view text, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    std::string content = trimmed(line);
    if (content.empty() || content.front() == '#') continue;
    auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError(origin + ":" + std::to_string(number) + ": expected key = value");
    }
    try {
      set(trimmed(std::string_view(content).substr(0, eq)), std::string_view(content).substr(eq + 1));
    } catch (const ArgumentError& e) {
      throw ArgumentError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void AppConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  apply_file_text(buffer.str(), path);
}

void AppConfig::apply_env(const std::function<const char*(const char*)>& getenv) {
  if (const char* v = getenv("RECALL_API_BASE"); v && *v) api_base = v;
  if (const char* v = getenv("RECALL_API_KEY"); v && *v) api_key = v;
  if (const char* v = getenv("RECALL_MODEL"); v && *v) model = v;
}

void AppConfig::apply_overrides(const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw ArgumentError("expected key=value, got '" + a + "'");
    set(trimmed(std::string_view(a).substr(0, eq)), std::string_view(a).substr(eq + 1));
  }
}

bool AppConfig::offline() const {
  switch (provider_mode) {
    case ProviderMode::offline: return true;
    case ProviderMode::remote: return false;
    case ProviderMode::automatic: return api_base.empty();
  }
  return true;
}

RemoteConfig AppConfig::remote() const {
  RemoteConfig rc;
  if (!api_base.empty()) rc.base_url = api_base;
  rc.api_key = api_key;
  rc.model = model;
  rc.embedding_model = embedding_model;
  rc.max_attempts = max_attempts;
  return rc;
}

nlohmann::json AppConfig::to_json() const {
  nlohmann::json revision_doc = {{"enabled", revision.enabled},
                                 {"merges_per_revision", revision.merges_per_revision},
                                 {"max_context_chars", revision.max_context_chars}};
  return {{"store", {{"graph", graph_path}, {"vectors", vector_path}}},
          {"retrieval", retrieval},
          {"top_k", top_k},
          {"revision", revision_doc},
          {"provider",
           {{"mode", to_string(provider_mode)},
            {"offline", offline()},
            {"base_url", api_base},
            {"model", model},
            {"embedding_model", embedding_model},
            {"api_key_set", !api_key.empty()}}},
          {"embedder", {{"mode", embedder == EmbedderMode::hashed ? "hashed" : "remote"},
                        {"dimension", embedding_dimension}}},
          {"bench",
           {{"reps", bench_repetitions}, {"checkpoints", bench_checkpoints}, {"raw_budget", bench_raw_budget}}},
          {"server", {{"host", host}, {"port", port}}}};
}

}  // namespace recallm
