#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tempabd/theory.hpp"

namespace tempabd {

struct VerbToken {
  std::string token;
  std::string word;
  std::string form;  // past_participle, present_tense, past_tense or infinitive
};

struct AdjunctToken {
  std::string token;
  Term word;  // ground: gisteren, na(a1), om(4), ...
};

/// One clause: its verb tokens, the main verb, the auxiliary chain and the
/// adjuncts attached to it.
struct SentenceDescription {
  std::string clause;
  std::vector<VerbToken> verbs;
  std::vector<std::string> main_verbs;  // exactly one when valid
  std::vector<std::pair<std::string, std::string>> aux_verbs;  // (aux, complement)
  std::vector<AdjunctToken> adjuncts;
  std::vector<std::string> clause_adjuncts;  // s_adjunct edges from the clause
};

class SentenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a sentence description in JSON (format in README.md). Throws
/// SentenceError.
SentenceDescription parse_sentence(std::string_view json_text);

/// Throws SentenceError describing the first structural problem found.
void validate(const SentenceDescription& d);

/// The input facts for `d`, as `p(..) <- true.` rules. Validates first.
std::vector<Rule> encode_sentence(const SentenceDescription& d);

/// Facts in theory-language syntax, one per line.
std::string facts_text(std::span<const Rule> facts);

/// The shipped knowledge base files, in load order.
std::vector<std::string> default_kb_paths();

/// Loads and validates the given theory files (the shipped ones when empty).
Theory load_kb(std::span<const std::string> paths = {});

}  // namespace tempabd
