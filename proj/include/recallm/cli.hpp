#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace recallm {

class ChatProvider;
class Embedder;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Test seams. Unset members fall back to the configured backends.
struct CliHooks {
  std::shared_ptr<ChatProvider> chat;
  std::shared_ptr<Embedder> embedder;
  std::function<const char*(const char*)> getenv;  // defaults to std::getenv
};

// Entry point of the recallm command. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            const CliHooks& hooks = {});

}  // namespace recallm
