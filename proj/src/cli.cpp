#include "projed/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <charconv>
#include <ostream>
#include <thread>

#include "projed/bridge.hpp"
#include "projed/persist.hpp"
#include "projed/script.hpp"
#include "projed/sexpr.hpp"

namespace projed::cli {

namespace fs = std::filesystem;

namespace {

int status_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kIo;
  if (dynamic_cast<const FuelExhaustedError*>(&e)) return kFuel;
  return kSemantic;
}

int report(std::ostream& err, const std::string& where, const std::exception& e) {
  err << where << ": " << e.what() << "\n";
  return status_for(e);
}

std::shared_ptr<const LanguageDef> load_language(const fs::path& lang) {
  return std::make_shared<const LanguageDef>(load_language_file(lang));
}

}  // namespace

Fuel fuel_from_env() {
  Fuel fuel;
  if (const char* v = std::getenv("PROJED_FUEL")) {
    std::string_view s(v);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) fuel.max_steps = n;
  }
  return fuel;
}

std::optional<Viewport> parse_viewport(std::string_view text) {
  auto x = text.find('x');
  if (x == std::string_view::npos) return std::nullopt;
  Viewport v;
  auto w = text.substr(0, x), h = text.substr(x + 1);
  auto [p1, e1] = std::from_chars(w.data(), w.data() + w.size(), v.width);
  auto [p2, e2] = std::from_chars(h.data(), h.data() + h.size(), v.height);
  if (e1 != std::errc() || e2 != std::errc() || p1 != w.data() + w.size() ||
      p2 != h.data() + h.size() || v.width <= 0 || v.height <= 0) {
    return std::nullopt;
  }
  return v;
}

Session open_session(const fs::path& lang, const std::string& start, const Options& options) {
  auto def = load_language(lang);
  SessionOptions so{options.fuel, options.viewport};
  if (!options.init) return Session::start(def, start, so);
  std::string text = read_file(*options.init);
  if (options.init->extension() == ".pxml") {
    Session s = load_session(text, def, so);
    if (s.start_clause() != start) {
      throw SessionError(options.init->string() + " starts from '" + s.start_clause() +
                         "', not '" + start + "'");
    }
    return s;
  }
  auto forms = read_sexpr(text);
  if (forms.size() != 1) throw SessionError(options.init->string() + " must hold exactly one term");
  return Session::resume(def, start, sexpr_to_term(forms.front()), {}, so);
}

void write_snapshot(const Session& s, const fs::path& dir, const std::string& name) {
  write_file(dir / (name + ".svg"), render_svg(s.scene()));
  write_file(dir / (name + ".txt"), render_text(s.scene()));
  write_file(dir / (name + ".pxml"), save_session(s));
}

int cmd_check(const fs::path& lang, std::ostream& err) {
  std::string text;
  try {
    text = read_file(lang);
  } catch (const IoError& e) {
    return report(err, lang.string(), e);
  }
  try {
    LanguageDef def = parse_language_text(text);
    auto diags = validate_language(def);
    for (const auto& d : diags) {
      err << lang.string() << ":" << d.pos.line << ": " << d.message << "\n";
    }
    return diags.empty() ? kOk : kSemantic;
  } catch (const ParseError& e) {
    err << lang.string() << ":" << e.what() << "\n";
    return kSemantic;
  } catch (const Error& e) {
    return report(err, lang.string(), e);
  }
}

int cmd_run(const fs::path& lang, const std::string& start, const fs::path& script,
            const fs::path& out_dir, const Options& options, std::ostream& err) {
  std::vector<ScriptStep> steps;
  std::optional<Session> session;
  try {
    steps = parse_script(read_file(script));
    session = open_session(lang, start, options);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  } catch (const ScriptError& e) {
    return report(err, script.string(), e);
  } catch (const std::exception& e) {
    return report(err, lang.string(), e);
  }
  int status = kOk;
  try {
    for (const auto& step : steps) {
      if (step.verb == ScriptStep::Verb::Snapshot) {
        write_snapshot(*session, out_dir, step.args[0]);
        continue;
      }
      *session = apply_step(*session, step);
      for (const auto& d : session->diagnostics()) {
        err << script.string() << ":" << step.line << ": " << d << "\n";
      }
      if (session->fuel_exhausted()) status = kFuel;
    }
    write_snapshot(*session, out_dir, "final");
  } catch (const std::exception& e) {
    return report(err, out_dir.string(), e);
  }
  return status;
}

int cmd_render(const fs::path& session_pxml, const fs::path& lang, const fs::path& out_svg,
               const Options& options, std::ostream& err) {
  try {
    auto def = load_language(lang);
    Session s = load_session(read_file(session_pxml), def, {options.fuel, options.viewport});
    write_file(out_svg, render_svg(s.scene()));
    return kOk;
  } catch (const IoError& e) {
    return report(err, "render", e);
  } catch (const std::exception& e) {
    // Anything wrong with the saved session itself counts as a semantic error.
    err << session_pxml.string() << ": " << e.what() << "\n";
    return kSemantic;
  }
}

int cmd_serve(const fs::path& lang, const std::string& start, int port, const Options& options,
              std::ostream& err, const std::optional<fs::path>& record) {
  std::optional<BridgeServer> server;
  try {
    Session s = open_session(lang, start, options);
    server.emplace(BridgeEngine(std::move(s)), port);
  } catch (const std::exception& e) {
    return report(err, "serve", e);
  }
  err << "listening on 127.0.0.1:" << server->port() << "\n";

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server->stop();
  });
  server->run();
  waiter.join();

  if (record) {
    try {
      std::string text;
      for (const auto& line : server->recorded_script()) text += line + "\n";
      write_file(*record, text);
    } catch (const IoError& e) {
      return report(err, "serve", e);
    }
  }
  return kOk;
}

}  // namespace projed::cli
