#pragma once

// The commands behind the projed executable. Each returns the process exit
// status: 0 ok, 1 language or semantic error, 2 I/O, 3 fuel exhausted.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "projed/rewrite.hpp"
#include "projed/scene.hpp"
#include "projed/session.hpp"

namespace projed::cli {

enum Status { kOk = 0, kSemantic = 1, kIo = 2, kFuel = 3 };

struct Options {
  Fuel fuel;
  Viewport viewport;
  // A .pxml session or a .term s-expression to start from instead of the
  // start clause's empty tree.
  std::optional<std::filesystem::path> init;
};

// PROJED_FUEL if set and valid, else the default.
Fuel fuel_from_env();
std::optional<Viewport> parse_viewport(std::string_view text);

// Builds the starting session for run and serve.
Session open_session(const std::filesystem::path& lang, const std::string& start,
                     const Options& options);

int cmd_check(const std::filesystem::path& lang, std::ostream& err);
int cmd_run(const std::filesystem::path& lang, const std::string& start,
            const std::filesystem::path& script, const std::filesystem::path& out_dir,
            const Options& options, std::ostream& err);
int cmd_render(const std::filesystem::path& session_pxml, const std::filesystem::path& lang,
               const std::filesystem::path& out_svg, const Options& options, std::ostream& err);
// Runs until SIGINT or SIGTERM.
// The accepted events are written to `record` as a script on the way out.
int cmd_serve(const std::filesystem::path& lang, const std::string& start, int port,
              const Options& options, std::ostream& err,
              const std::optional<std::filesystem::path>& record = std::nullopt);

// Writes <name>.svg, <name>.txt and <name>.pxml.
void write_snapshot(const Session& s, const std::filesystem::path& dir, const std::string& name);

}  // namespace projed::cli
