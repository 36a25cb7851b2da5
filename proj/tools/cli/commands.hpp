#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace cdes::cli {

void cmd_train(const RunConfig& config, std::ostream& out);
void cmd_build_bank(const RunConfig& config, std::ostream& out);
void cmd_eval_wsd(const RunConfig& config, std::ostream& out);
void cmd_eval_wic(const RunConfig& config, std::ostream& out);
void cmd_neighbors(const RunConfig& config, std::ostream& out);

struct InspectOptions {
  std::filesystem::path file;
  // auto, table, inventory, dump, checkpoint, bank, collocations, keys
  std::string format = "auto";
  bool json = false;
};
void cmd_inspect(const InspectOptions& options, std::ostream& out);

// "sentence_id<TAB>lemma lemma ..." per line.
struct CorpusSentence {
  std::string id;
  std::vector<std::string> lemmas;
};
std::vector<CorpusSentence> load_corpus_sentences(const std::filesystem::path& path);

}  // namespace cdes::cli
