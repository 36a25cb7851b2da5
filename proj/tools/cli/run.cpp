#include "run.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "cdes/error.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace cdes::cli {

namespace {

constexpr const char* kSettingsHelp = R"(Settings come from --config FILE (key = value lines) and --key value
overrides; overrides win. Common keys:
  static_table inventory train_dump checkpoint bank output_dir seed threads
  learning_rate batch_size epochs activation init_scheme validation_fraction
  collocations corpus_sentences corpus_dump labeler labeler_file fill_policy
  eval_dumps eval_keys eval_names k_candidates fallback
  wic_train_dump wic_train_pairs wic_test_dump wic_test_pairs wic_epochs
  query query_vector top_n
Exit codes: 0 success, 1 invalid configuration or input, 2 runtime failure.)";

// "--key value", "--key=value" and bare "--flag" (= true).
SettingMap parse_overrides(const std::vector<std::string>& extras) {
  SettingMap out;
  const std::filesystem::path cwd = std::filesystem::current_path();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.size() == 2) {
      throw ValidationError("unexpected argument '" + tok + "'");
    }
    const auto eq = tok.find('=');
    if (eq != std::string::npos) {
      out[normalize_key(tok.substr(0, eq))] = {tok.substr(eq + 1), cwd};
    } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
      out[normalize_key(tok)] = {extras[i + 1], cwd};
      ++i;
    } else {
      out[normalize_key(tok)] = {"true", cwd};
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cdes: context-derived sense embeddings", "cdes"};
  app.require_subcommand(1);
  app.footer(kSettingsHelp);
  app.set_version_flag("--version", "cdes 0.1.0");

  using Command = std::function<void(const RunConfig&, std::ostream&)>;
  const std::vector<std::tuple<std::string, std::string, Command>> pipeline{
      {"train", "learn the filter matrix and sense diagonals", cmd_train},
      {"build-bank", "assemble the composite sense bank", cmd_build_bank},
      {"eval-wsd", "1-NN word sense disambiguation and scoring", cmd_eval_wsd},
      {"eval-wic", "train and evaluate the WiC classifier", cmd_eval_wic},
      {"neighbors", "nearest senses of a sense id or vector", cmd_neighbors},
  };

  std::string config_path;
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : pipeline) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "key = value settings file");
    sub->allow_extras();
    subs.emplace_back(sub, fn);
  }
  InspectOptions inspect;
  CLI::App* inspect_cmd = app.add_subcommand("inspect", "print header and statistics of a file");
  inspect_cmd->add_option("file", inspect.file, "file to inspect")->required();
  inspect_cmd->add_option("--format", inspect.format,
                          "auto, table, inventory, dump, checkpoint, bank, collocations, keys");
  inspect_cmd->add_flag("--json", inspect.json, "print JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "cdes 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "cdes: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (inspect_cmd->parsed()) {
      cmd_inspect(inspect, out);
      return kExitOk;
    }
    for (const auto& [sub, fn] : subs) {
      if (!sub->parsed()) continue;
      SettingMap settings;
      if (!config_path.empty()) settings = read_config_file(config_path);
      merge_settings(settings, parse_overrides(sub->remaining()));
      fn(resolve_config(settings), out);
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "cdes: invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "cdes: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace cdes::cli
