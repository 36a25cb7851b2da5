#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdes/disambiguator.hpp"
#include "cdes/sense_bank.hpp"
#include "cdes/trainer.hpp"
#include "cdes/wic.hpp"

namespace cdes::cli {

// One key=value setting. Relative paths resolve against `base`: the config
// file's directory for file settings, the working directory for overrides.
struct Setting {
  std::string value;
  std::filesystem::path base;
};

using SettingMap = std::map<std::string, Setting>;

// "--top-n" and "top-n" both become "top_n".
std::string normalize_key(std::string_view key);

// Flat "key = value" lines; '#' starts a comment line. Throws ValidationError.
SettingMap read_config_file(const std::filesystem::path& path);

// Later settings win.
void merge_settings(SettingMap& into, const SettingMap& overrides);

enum class Labeler { kMajority, kFirstSense, kExternal };

struct RunConfig {
  // inputs
  std::filesystem::path static_table;
  bool lowercase = false;
  std::filesystem::path inventory;
  std::filesystem::path train_dump;
  std::filesystem::path collocations;
  std::filesystem::path corpus_sentences;
  std::filesystem::path corpus_dump;
  std::filesystem::path labeler_file;
  std::vector<std::filesystem::path> eval_dumps;
  std::vector<std::filesystem::path> eval_keys;
  std::vector<std::string> eval_names;
  std::filesystem::path wic_train_dump;
  std::filesystem::path wic_train_pairs;
  std::filesystem::path wic_train_gold;
  std::filesystem::path wic_test_dump;
  std::filesystem::path wic_test_pairs;
  std::filesystem::path wic_test_gold;

  // artefacts; empty means "<output_dir>/model.cdem" and "<output_dir>/bank.cdeb"
  std::filesystem::path output_dir = ".";
  std::filesystem::path checkpoint;
  std::filesystem::path bank;

  std::uint64_t seed = 0;
  std::size_t threads = 1;

  TrainConfig train;

  FillPolicy fill_policy = FillPolicy::kZero;
  Labeler labeler = Labeler::kMajority;
  CollocationOptions collocation;
  std::size_t kmeans_max_iter = 100;
  // Handed to external labelling tools; not used internally.
  std::size_t ukb_words = 5;

  std::size_t k_candidates = 3;
  Fallback fallback = Fallback::kNone;

  LogisticOptions logistic;

  std::string query;
  std::optional<Vector> query_vector;
  std::size_t top_n = 5;

  std::filesystem::path checkpoint_path() const;
  std::filesystem::path bank_path() const;
};

// Converts settings to a RunConfig; unknown keys and malformed values throw
// ValidationError. `threads` defaults to the machine's core count.
RunConfig resolve_config(const SettingMap& settings);

std::string_view to_string(Labeler l);

}  // namespace cdes::cli
