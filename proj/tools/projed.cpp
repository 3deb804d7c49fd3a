#include <iostream>

#include "CLI11.hpp"
#include "projed/bridge.hpp"
#include "projed/cli.hpp"

namespace cli = projed::cli;

int main(int argc, char** argv) {
  CLI::App app{"projed: projectional editing from language definitions"};
  app.require_subcommand(1);

  std::size_t fuel = cli::fuel_from_env().max_steps;
  std::string viewport = "800x600";
  app.add_option("--fuel", fuel, "rewrite step budget per transform/reduce")
      ->check(CLI::PositiveNumber);
  app.add_option("--viewport", viewport, "layout viewport, WxH");

  std::string lang, start, script, out_dir = ".", pxml, out_svg, init, record;
  int port = projed::kDefaultPort;

  auto* check = app.add_subcommand("check", "validate a language definition");
  check->add_option("lang", lang, "language file")->required();

  auto* run = app.add_subcommand("run", "replay an event script headlessly");
  run->add_option("lang", lang, "language file")->required();
  run->add_option("start", start, "start clause")->required();
  run->add_option("script", script, "event script")->required();
  run->add_option("--out", out_dir, "snapshot directory");
  run->add_option("--init", init, "start from a .pxml session or .term file");

  auto* render = app.add_subcommand("render", "render a saved session to SVG");
  render->add_option("session", pxml, "session file")->required();
  render->add_option("lang", lang, "language file")->required();
  render->add_option("out", out_svg, "SVG output")->required();

  auto* serve = app.add_subcommand("serve", "serve a session to UI clients");
  serve->add_option("lang", lang, "language file")->required();
  serve->add_option("start", start, "start clause")->required();
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--init", init, "start from a .pxml session or .term file");
  serve->add_option("--record", record, "write accepted events here as a script on exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kIo;
  }

  cli::Options options;
  options.fuel.max_steps = fuel;
  auto vp = cli::parse_viewport(viewport);
  if (!vp) {
    std::cerr << "bad --viewport '" << viewport << "', expected WxH\n";
    return cli::kIo;
  }
  options.viewport = *vp;
  if (!init.empty()) options.init = init;

  if (*check) return cli::cmd_check(lang, std::cerr);
  if (*run) return cli::cmd_run(lang, start, script, out_dir, options, std::cerr);
  if (*render) return cli::cmd_render(pxml, lang, out_svg, options, std::cerr);
  std::optional<std::filesystem::path> rec;
  if (!record.empty()) rec = record;
  return cli::cmd_serve(lang, start, port, options, std::cerr, rec);
}
