#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include "cdes/error.hpp"
#include "cdes/random.hpp"

namespace cdes::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            std::string_view expected) {
  throw ValidationError("setting '" + key + "': '" + value + "' is not " + std::string(expected));
}

std::uint64_t as_u64(const std::string& key, const Setting& s) {
  std::uint64_t v = 0;
  const auto* end = s.value.data() + s.value.size();
  auto [ptr, ec] = std::from_chars(s.value.data(), end, v);
  if (ec != std::errc() || ptr != end || s.value.empty()) bad_value(key, s.value, "an unsigned integer");
  return v;
}

std::size_t as_size(const std::string& key, const Setting& s) {
  return static_cast<std::size_t>(as_u64(key, s));
}

double as_double(const std::string& key, const Setting& s) {
  double v = 0;
  const auto* end = s.value.data() + s.value.size();
  auto [ptr, ec] = std::from_chars(s.value.data(), end, v);
  if (ec != std::errc() || ptr != end || s.value.empty() || !std::isfinite(v)) {
    bad_value(key, s.value, "a finite number");
  }
  return v;
}

bool as_bool(const std::string& key, const Setting& s) {
  if (s.value == "true" || s.value == "1" || s.value == "yes" || s.value == "on") return true;
  if (s.value == "false" || s.value == "0" || s.value == "no" || s.value == "off") return false;
  bad_value(key, s.value, "a boolean");
}

fs::path as_path(const Setting& s) {
  if (s.value.empty()) return {};
  fs::path p(s.value);
  return p.is_absolute() ? p : (s.base / p).lexically_normal();
}

std::vector<std::string> as_list(const Setting& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.value.size()) {
    const auto comma = s.value.find(',', start);
    const auto item = trim(std::string_view(s.value).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<fs::path> as_path_list(const Setting& s) {
  std::vector<fs::path> out;
  for (const auto& item : as_list(s)) out.push_back(as_path({item, s.base}));
  return out;
}

Vector as_vector(const std::string& key, const Setting& s) {
  Vector out;
  std::string text = s.value;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    if (i == text.size()) break;
    auto j = text.find(' ', i);
    if (j == std::string::npos) j = text.size();
    out.push_back(static_cast<float>(as_double(key, {text.substr(i, j - i), {}})));
    i = j;
  }
  if (out.empty()) bad_value(key, s.value, "a list of numbers");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Setting&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto path = [&t](const char* key, fs::path RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string&, const Setting& s) { c.*field = as_path(s); };
    };
    path("static_table", &RunConfig::static_table);
    path("inventory", &RunConfig::inventory);
    path("train_dump", &RunConfig::train_dump);
    path("collocations", &RunConfig::collocations);
    path("corpus_sentences", &RunConfig::corpus_sentences);
    path("corpus_dump", &RunConfig::corpus_dump);
    path("labeler_file", &RunConfig::labeler_file);
    path("wic_train_dump", &RunConfig::wic_train_dump);
    path("wic_train_pairs", &RunConfig::wic_train_pairs);
    path("wic_train_gold", &RunConfig::wic_train_gold);
    path("wic_test_dump", &RunConfig::wic_test_dump);
    path("wic_test_pairs", &RunConfig::wic_test_pairs);
    path("wic_test_gold", &RunConfig::wic_test_gold);
    path("output_dir", &RunConfig::output_dir);
    path("checkpoint", &RunConfig::checkpoint);
    path("bank", &RunConfig::bank);

    t["lowercase"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.lowercase = as_bool(k, s); };
    t["eval_dumps"] = [](RunConfig& c, const std::string&, const Setting& s) { c.eval_dumps = as_path_list(s); };
    t["eval_keys"] = [](RunConfig& c, const std::string&, const Setting& s) { c.eval_keys = as_path_list(s); };
    t["eval_names"] = [](RunConfig& c, const std::string&, const Setting& s) { c.eval_names = as_list(s); };
    t["seed"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.seed = as_u64(k, s); };
    t["threads"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.threads = as_size(k, s); };

    t["learning_rate"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.train.learning_rate = as_double(k, s); };
    t["batch_size"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.train.batch_size = as_size(k, s); };
    t["epochs"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.train.epochs = as_size(k, s); };
    t["adam_beta1"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.train.adam_beta1 = as_double(k, s); };
    t["adam_beta2"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.train.adam_beta2 = as_double(k, s); };
    t["adam_epsilon"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.train.adam_epsilon = as_double(k, s); };
    t["validation_fraction"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.train.validation_fraction = as_double(k, s); };
    t["init_scheme"] = [](RunConfig& c, const std::string& k, const Setting& s) {
      auto v = parse_init_scheme(s.value);
      if (!v) bad_value(k, s.value, "one of xavier, uniform01");
      c.train.init_scheme = *v;
    };
    t["activation"] = [](RunConfig& c, const std::string& k, const Setting& s) {
      auto v = parse_activation(s.value);
      if (!v) bad_value(k, s.value, "one of linear, relu, gelu");
      c.train.activation = *v;
    };

    t["fill_policy"] = [](RunConfig& c, const std::string& k, const Setting& s) {
      auto v = parse_fill_policy(s.value);
      if (!v) bad_value(k, s.value, "one of zero, copy_gloss, skip_sense");
      c.fill_policy = *v;
    };
    t["labeler"] = [](RunConfig& c, const std::string& k, const Setting& s) {
      if (s.value == "majority") c.labeler = Labeler::kMajority;
      else if (s.value == "first_sense") c.labeler = Labeler::kFirstSense;
      else if (s.value == "external") c.labeler = Labeler::kExternal;
      else bad_value(k, s.value, "one of majority, first_sense, external");
    };
    t["window"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.collocation.window = as_size(k, s); };
    t["max_sentences_per_lemma"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.collocation.max_sentences_per_lemma = as_size(k, s); };
    t["kmeans_max_iter"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.kmeans_max_iter = as_size(k, s); };
    t["ukb_words"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.ukb_words = as_size(k, s); };

    t["k_candidates"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.k_candidates = as_size(k, s); };
    t["fallback"] = [](RunConfig& c, const std::string& k, const Setting& s) {
      if (s.value == "none") c.fallback = Fallback::kNone;
      else if (s.value == "mfs") c.fallback = Fallback::kMostFrequent;
      else bad_value(k, s.value, "one of none, mfs");
    };

    t["wic_learning_rate"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.logistic.learning_rate = as_double(k, s); };
    t["wic_epochs"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.logistic.epochs = as_size(k, s); };
    t["wic_l2"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.logistic.l2 = as_double(k, s); };
    t["wic_standardize"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.logistic.standardize = as_bool(k, s); };

    t["query"] = [](RunConfig& c, const std::string&, const Setting& s) { c.query = s.value; };
    t["query_vector"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.query_vector = as_vector(k, s); };
    t["top_n"] = [](RunConfig& c, const std::string& k, const Setting& s) { c.top_n = as_size(k, s); };
    return t;
  }();
  return table;
}

}  // namespace

std::string normalize_key(std::string_view key) {
  while (!key.empty() && key.front() == '-') key.remove_prefix(1);
  std::string out(key);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

SettingMap read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  SettingMap out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const std::string key = normalize_key(trim(std::string_view(text).substr(0, eq)));
    if (key.empty()) throw ValidationError(where + ": empty key");
    if (out.contains(key)) throw ValidationError(where + ": '" + key + "' set twice");
    out[key] = {trim(std::string_view(text).substr(eq + 1)), base};
  }
  return out;
}

void merge_settings(SettingMap& into, const SettingMap& overrides) {
  for (const auto& [k, v] : overrides) into[k] = v;
}

RunConfig resolve_config(const SettingMap& settings) {
  RunConfig config;
  config.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto& table = setters();
  for (const auto& [key, setting] : settings) {
    auto it = table.find(key);
    if (it == table.end()) throw ValidationError("unknown setting '" + key + "'");
    it->second(config, key, setting);
  }
  if (config.threads == 0) throw ValidationError("threads must be at least 1");
  config.train.threads = config.threads;
  config.train.seed = derive_seed(config.seed, "train");
  config.logistic.seed = derive_seed(config.seed, "wic");
  if (config.k_candidates == 0) throw ValidationError("k_candidates must be at least 1");
  if (config.top_n == 0) throw ValidationError("top_n must be at least 1");
  if (config.collocation.window == 0) throw ValidationError("window must be at least 1");
  config.train.validate();
  return config;
}

fs::path RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? output_dir / "model.cdem" : checkpoint;
}

fs::path RunConfig::bank_path() const { return bank.empty() ? output_dir / "bank.cdeb" : bank; }

std::string_view to_string(Labeler l) {
  switch (l) {
    case Labeler::kMajority: return "majority";
    case Labeler::kFirstSense: return "first_sense";
    case Labeler::kExternal: return "external";
  }
  return "majority";
}

}  // namespace cdes::cli
