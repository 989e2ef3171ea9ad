// tempabd: abduce temporal models for an encoded Dutch sentence.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tempabd/engine.hpp"
#include "tempabd/render.hpp"
#include "tempabd/sentence.hpp"

using namespace tempabd;

namespace {

enum Exit { kModel = 0, kNo = 1, kError = 2 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CalendarHour parse_epoch(const std::string& s) {
  CalendarHour t{0, 0, 0, 0};
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%d%c", &t.year, &t.month, &t.day, &tail) != 3 || !is_valid(t))
    throw CLI::ValidationError("--epoch", "expected a valid date YYYY-MM-DD, got " + s);
  return t;
}

struct RunConfig {
  std::vector<std::string> kb_paths;
  std::string input_path;
  std::string query;
  bool all_models = false;
  std::size_t max_models = 10;
  std::string epoch;
  std::string format = "text";
  std::size_t node_limit = 1000000;
};

int run(const RunConfig& cfg) {
  std::vector<std::string> files = cfg.kb_paths.empty() ? default_kb_paths() : cfg.kb_paths;
  if (!cfg.input_path.empty()) files.push_back(cfg.input_path);
  Theory theory = load_theory_files(files);

  VarId next = theory.var_limit();
  Formula query;
  if (!cfg.query.empty()) query = parse_query(cfg.query, theory, next);

  SolveOptions opts;
  opts.node_limit = cfg.node_limit;
  opts.labeling.node_limit = cfg.node_limit;
  if (!cfg.epoch.empty()) opts.labeling.epoch = parse_epoch(cfg.epoch);
  Engine engine(theory, opts);
  const bool json_out = cfg.format == "json";

  if (!cfg.all_models) {
    SolveOutcome r = engine.solve(query);
    if (r.kind == OutcomeKind::Floundered) {
      std::cerr << "tempabd: floundered on " << r.offending << "\n";
      return kError;
    }
    if (r.kind == OutcomeKind::Unsatisfiable) {
      std::cout << (json_out ? "null" : "no") << "\n";
      return kNo;
    }
    std::cout << (json_out ? render_json(*r.model) + "\n" : render_text(*r.model));
    return kModel;
  }

  Enumeration e = engine.enumerate(query, cfg.max_models);
  if (e.models.empty()) {
    if (!e.floundered.empty()) {
      std::cerr << "tempabd: floundered on " << e.floundered << "\n";
      return kError;
    }
    std::cout << (json_out ? "[]" : "no") << "\n";
    return kNo;
  }
  if (!e.floundered.empty()) std::cerr << "tempabd: warning: some branches floundered on " << e.floundered << "\n";
  if (json_out) {
    std::cout << "[";
    for (std::size_t i = 0; i < e.models.size(); ++i)
      std::cout << (i ? ",\n" : "\n") << render_json(e.models[i]);
    std::cout << "\n]\n";
  } else {
    for (std::size_t i = 0; i < e.models.size(); ++i) std::cout << (i ? "\n" : "") << render_text(e.models[i]);
  }
  return kModel;
}

int encode(const std::string& path) {
  SentenceDescription d = parse_sentence(read_file(path));
  std::vector<Rule> facts = encode_sentence(d);
  std::cout << facts_text(facts);
  return kModel;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abductive temporal interpretation of Dutch sentences"};
  app.set_version_flag("--version", "tempabd 1.0");
  RunConfig cfg;
  app.add_option("--kb", cfg.kb_paths, "Knowledge base files (default: the shipped KB)")->check(CLI::ExistingFile);
  app.add_option("--input", cfg.input_path, "Sentence facts file")->check(CLI::ExistingFile);
  app.add_option("--query", cfg.query, "Observation formula to explain");
  app.add_flag("--all-models", cfg.all_models, "Enumerate structurally distinct models");
  app.add_option("--max-models", cfg.max_models, "Upper bound for --all-models")->check(CLI::PositiveNumber);
  app.add_option("--epoch", cfg.epoch, "Preferred earliest date for labeling, YYYY-MM-DD");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--node-limit", cfg.node_limit, "Search node limit")->check(CLI::PositiveNumber);

  std::string encode_path;
  CLI::App* enc = app.add_subcommand("encode", "Turn a JSON sentence description into a facts file");
  enc->add_option("file", encode_path, "Sentence description (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*enc) return encode(encode_path);
    return run(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "tempabd: " << e.what() << "\n";
  } catch (const ResourceLimitError& e) {
    std::cerr << "tempabd: resource limit: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "tempabd: " << e.what() << "\n";
  }
  return kError;
}
