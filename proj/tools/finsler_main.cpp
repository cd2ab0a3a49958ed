// finsler: identity verification, tensor dumps and conformal classification
// for Finsler structures and their tangent-bundle lift metrics.
//
// Exit codes: 0 pass, 1 check failures, 2 config error, 3 domain error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "finsler/app/commands.hpp"

namespace {

constexpr const char* kVersion = "finsler 0.1.0";

std::vector<double> parse_csv(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw finsler::app::ConfigError(std::string("--") + what + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw finsler::app::ConfigError(std::string("--") + what + " is empty");
  return out;
}

int emit(const finsler::app::Report& r, const std::string& out_path, double seconds) {
  const std::string text = finsler::app::render_report(r, seconds);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw finsler::app::ConfigError("cannot write report to '" + out_path + "'");
    out << text;
    std::fprintf(stderr, "%s: %s (%d checks, %d failed)\n", r.command.c_str(), r.pass() ? "pass" : "FAIL",
                 static_cast<int>(r.checks.size()), r.failed());
  }
  return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace finsler;
  CLI::App app{"Finsler geometry, lift metrics and complete-lift conformal fields"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_path, mode_text, x_csv, y_csv;
  auto* verify = app.add_subcommand("verify", "run the identity suites over the validation grid");
  verify->add_option("--config", config_path, "config file (JSON)")->required();
  verify->add_option("--mode", mode_text, "jet or fd");
  verify->add_option("--out", out_path, "write the report here instead of stdout");

  auto* classify = app.add_subcommand("classify", "classify complete lifts of the configured fields");
  classify->add_option("--config", config_path, "config file (JSON)")->required();
  classify->add_option("--out", out_path, "write the report here instead of stdout");

  auto* tensors = app.add_subcommand("tensors", "dump g, g_inv, C, G, N, F, R at one sample");
  tensors->add_option("--config", config_path, "config file (JSON)")->required();
  tensors->add_option("--x", x_csv, "base point, comma separated")->required();
  tensors->add_option("--y", y_csv, "fiber vector, comma separated")->required();
  tensors->add_option("--mode", mode_text, "jet or fd");
  tensors->add_option("--out", out_path, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    const app::RunConfig config = app::load_config(config_path);
    std::optional<app::Mode> mode;
    if (!mode_text.empty()) mode = app::parse_mode(mode_text);
    if (verify->parsed()) {
      const auto report = app::cmd_verify(config, mode);
      return emit(report, out_path, elapsed());
    }
    if (classify->parsed()) {
      const auto report = app::cmd_classify(config);
      return emit(report, out_path, elapsed());
    }
    const auto sample = TangentSample::make(parse_csv(x_csv, "x"), parse_csv(y_csv, "y"));
    const auto report = app::cmd_tensors(config, sample, mode);
    return emit(report, out_path, elapsed());
  } catch (const app::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 3;
  } catch (const LinearAlgebraError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 3;
  }
}
