// rifl: reasoning-augmented classification pipeline.
//
//   transform    reasoning triples -> stage-1 prompt/completion files (80/20)
//   augment      labeled train file -> reasoning and label-only chat datasets
//   predict      labeled test file -> raw generations
//   evaluate     generations -> metrics report, confusion matrix
//   compare      several reports -> comparison tables and z-test
//   emit-config  trainer config for one of the two fine-tuning runs

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rifl/augment.hpp"
#include "rifl/corpus.hpp"
#include "rifl/genbackend.hpp"
#include "rifl/manifest.hpp"
#include "rifl/metrics.hpp"
#include "rifl/prompting.hpp"
#include "rifl/report.hpp"
#include "rifl/trainconfig.hpp"

namespace {

using namespace rifl;
namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct BackendFlags {
  bool stub = false;
  std::uint64_t seed = 0;
  std::string base_url;
  std::string model;
  std::size_t max_in_flight = 8;
  int max_new_tokens = 256;
  double temperature = 0.0;
  int max_retries = 2;
  int timeout_s = 120;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--stub", stub, "Use the deterministic stub generator instead of a remote endpoint");
    cmd->add_option("--seed", seed, "Stub seed and request seed")->capture_default_str();
    cmd->add_option("--base-url", base_url, "Endpoint base URL (default: $GEN_BASE_URL)");
    cmd->add_option("--model", model, "Model name sent to the endpoint (default: $GEN_MODEL)");
    cmd->add_option("--max-in-flight", max_in_flight, "Concurrent request bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-new-tokens", max_new_tokens, "Generation budget per request")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--temperature", temperature, "Sampling temperature")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--max-retries", max_retries, "Retries after a transient failure")->capture_default_str();
    cmd->add_option("--timeout", timeout_s, "Per-request timeout in seconds")->capture_default_str();
  }

  DecodingOptions decoding() const {
    DecodingOptions d;
    d.max_new_tokens = max_new_tokens;
    d.temperature = temperature;
    if (!stub) d.seed = seed;
    return d;
  }

  BackendConfig config() const {
    auto c = BackendConfig::from_env();
    if (!base_url.empty()) c.base_url = base_url;
    if (!model.empty()) c.model_name = model;
    c.max_in_flight = max_in_flight;
    c.max_retries = max_retries;
    c.request_timeout = std::chrono::seconds(timeout_s);
    return c;
  }

  std::unique_ptr<Generator> make() const {
    if (stub) return std::make_unique<StubGenerator>(seed);
    auto c = config();
    if (c.base_url.empty()) {
      throw ConfigError("no backend: pass --base-url, set GEN_BASE_URL, or use --stub");
    }
    return std::make_unique<HttpGenerator>(c);
  }

  void describe(RunManifest& m) const {
    m.stub = stub;
    m.seed = seed;
    if (!stub) m.backend = config();
    m.parameters.emplace_back("max_new_tokens", std::to_string(max_new_tokens));
    m.parameters.emplace_back("temperature", nlohmann::json(temperature).dump());
    m.parameters.emplace_back("max_in_flight", std::to_string(max_in_flight));
  }
};

void finish(RunManifest& manifest, const std::string& manifest_path) {
  manifest.outputs.push_back(manifest_path);
  write_text_file(manifest_path, manifest.to_json());
}

// --- transform ---------------------------------------------------------------

int run_transform(const std::string& input, const std::string& prefix, std::uint64_t seed) {
  const auto triples = read_triples_file(input);
  if (triples.empty()) throw DataError("no reasoning triples in " + input);
  std::vector<std::size_t> indices(triples.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  const auto split = split_80_20(indices, seed);

  auto write_part = [&](const std::string& path, const std::vector<std::size_t>& part) {
    PartialFile f(path);
    for (auto i : part) {
      nlohmann::ordered_json j;
      j["prompt"] = stage1_prompt(triples[i].question, triples[i].answer);
      j["completion"] = triples[i].reasoning;
      f.stream() << j.dump() << '\n';
    }
    f.commit();
  };
  const auto train_path = prefix + ".train.jsonl";
  const auto val_path = prefix + ".validation.jsonl";
  const auto split_path = prefix + ".split.json";
  write_part(train_path, split.train);
  write_part(val_path, split.validation);

  nlohmann::ordered_json sj;
  sj["seed"] = seed;
  sj["shuffle"] = "fisher-yates/mt19937_64";
  sj["total"] = triples.size();
  sj["train"] = split.train.size();
  sj["validation"] = split.validation.size();
  sj["train_indices"] = split.train;
  sj["validation_indices"] = split.validation;
  write_text_file(split_path, sj.dump(2) + "\n");

  RunManifest m;
  m.command = "transform";
  m.inputs = {input};
  m.outputs = {train_path, val_path, split_path};
  m.seed = seed;
  finish(m, prefix + ".manifest.json");
  std::cerr << "transform: " << split.train.size() << " train, " << split.validation.size() << " validation\n";
  return 0;
}

// --- augment -----------------------------------------------------------------

int run_augment(const std::string& input, const std::string& prefix, const BackendFlags& flags,
                std::size_t checkpoint_every) {
  const auto examples = read_examples_file(input);
  auto generator = flags.make();

  AugmentOptions opts;
  opts.decoding = flags.decoding();
  opts.max_in_flight = flags.max_in_flight;
  opts.checkpoint_every = checkpoint_every;
  const auto journal_path = prefix + ".journal.jsonl";
  opts.journal_path = journal_path;
  opts.on_progress = [](std::size_t done, std::size_t total) {
    std::cerr << "augment: " << done << "/" << total << "\n";
  };
  const auto result = augment_dataset(examples, *generator, opts);

  const auto alignment = verify_alignment(result.ra_records, result.a_records);
  if (!alignment.ok) throw Error("augmented datasets are misaligned: " + alignment.message);

  const auto ra_path = prefix + ".emotion-reasoning.jsonl";
  const auto a_path = prefix + ".no-emotion-reasoning.jsonl";
  const auto failures_path = prefix + ".failures.jsonl";
  auto write_records = [](const std::string& path, const std::vector<ChatRecord>& records) {
    PartialFile f(path);
    for (const auto& r : records) f.stream() << to_jsonl(r) << '\n';
    f.commit();
  };
  write_records(ra_path, result.ra_records);
  write_records(a_path, result.a_records);
  {
    PartialFile f(failures_path);
    for (const auto& fail : result.failures) {
      nlohmann::ordered_json j;
      j["id"] = fail.id;
      j["error"] = fail.error;
      f.stream() << j.dump() << '\n';
    }
    f.commit();
  }

  RunManifest m;
  m.command = "augment";
  m.inputs = {input};
  m.outputs = {ra_path, a_path, failures_path};
  flags.describe(m);
  m.parameters.emplace_back("records", std::to_string(result.ra_records.size()));
  m.parameters.emplace_back("failures", std::to_string(result.failures.size()));
  finish(m, prefix + ".manifest.json");
  std::filesystem::remove(journal_path);
  std::cerr << "augment: " << result.ra_records.size() << " records, " << result.failures.size() << " failures\n";
  return 0;
}

// --- predict -----------------------------------------------------------------

int run_predict(const std::string& input, const std::string& output, const std::string& profile,
                const BackendFlags& flags) {
  const auto examples = read_examples_file(input);
  if (examples.empty()) throw DataError("no examples in " + input);
  auto generator = flags.make();
  const auto decoding = flags.decoding();

  std::vector<GenRequest> requests;
  requests.reserve(examples.size());
  for (const auto& ex : examples) {
    auto chat = profile == "zeroshot" ? zeroshot_messages(ex.text) : downstream_messages(ex.text);
    requests.push_back(GenRequest::chat_request(std::move(chat), decoding));
  }
  const auto responses = generate_batch(*generator, requests, flags.max_in_flight);

  std::size_t failures = 0;
  {
    PartialFile f(output);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      PredictionRecord p{examples[i].id, examples[i].label, {}};
      if (responses[i].ok()) {
        p.generated = responses[i].text;
      } else {
        ++failures;
      }
      write_prediction(p, f.stream());
    }
    f.commit();
  }

  RunManifest m;
  m.command = "predict";
  m.inputs = {input};
  m.outputs = {output};
  flags.describe(m);
  m.parameters.emplace_back("profile", profile);
  m.parameters.emplace_back("failures", std::to_string(failures));
  finish(m, output + ".manifest.json");
  std::cerr << "predict: " << examples.size() << " records, " << failures << " failed generations\n";
  return 0;
}

// --- evaluate / compare --------------------------------------------------------

void check_against_gold(const std::vector<PredictionRecord>& preds, const std::string& gold_path) {
  const auto gold = read_examples_file(gold_path);
  std::map<std::uint64_t, EmotionLabel> by_id;
  for (const auto& ex : gold) by_id.emplace(ex.id, ex.label);
  if (by_id.size() != preds.size()) {
    throw DataError("id mismatch: " + std::to_string(preds.size()) + " predictions for " +
                    std::to_string(by_id.size()) + " gold examples");
  }
  for (const auto& p : preds) {
    auto it = by_id.find(p.id);
    if (it == by_id.end()) throw DataError("id mismatch: prediction id " + std::to_string(p.id) + " not in gold");
    if (it->second != p.gold) throw DataError("gold label mismatch for id " + std::to_string(p.id));
  }
}

int run_evaluate(const std::string& input, const std::string& prefix, std::string name, const std::string& gold) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw IoError("cannot open " + input);
  const auto preds = read_predictions(in);
  if (preds.empty()) throw DataError("no predictions in " + input);
  if (!gold.empty()) check_against_gold(preds, gold);
  if (name.empty()) name = fs::path(input).stem().string();

  const auto report = evaluate_predictions(preds, name);
  const std::string json_path = prefix + ".report.json";
  const std::string md_path = prefix + ".report.md";
  const std::string csv_path = prefix + ".confusion.csv";
  const std::string txt_path = prefix + ".confusion.txt";
  write_text_file(json_path, report_to_json(report));
  {
    std::ostringstream s;
    render_eval_report(report, s);
    write_text_file(md_path, s.str());
  }
  {
    std::ostringstream s;
    render_confusion(report.matrix, MatrixStyle::kCsv, s);
    write_text_file(csv_path, s.str());
  }
  {
    std::ostringstream s;
    render_confusion(report.matrix, MatrixStyle::kAscii, s);
    write_text_file(txt_path, s.str());
  }

  RunManifest m;
  m.command = "evaluate";
  m.inputs = {input};
  if (!gold.empty()) m.inputs.push_back(gold);
  m.outputs = {json_path, md_path, csv_path, txt_path};
  m.parameters.emplace_back("name", name);
  finish(m, prefix + ".manifest.json");
  std::cout << name << ": accuracy " << format_percent(report.correct(), report.total()) << "% ("
            << report.correct() << "/" << report.total() << ")\n";
  return 0;
}

int run_compare(const std::vector<std::string>& inputs, const std::string& output, const std::string& proposed,
                const std::string& baseline) {
  std::vector<EvalReport> runs;
  std::set<std::string> names;
  for (const auto& path : inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto r = report_from_json(buf.str());
    if (!names.insert(r.name).second) throw ConfigError("duplicate run name '" + r.name + "'");
    runs.push_back(std::move(r));
  }
  const auto cmp = make_comparison(std::move(runs), proposed, baseline);
  std::ostringstream s;
  render_comparison(cmp, s);
  write_text_file(output, s.str());

  RunManifest m;
  m.command = "compare";
  m.inputs = inputs;
  m.outputs = {output};
  m.parameters.emplace_back("proposed", proposed);
  m.parameters.emplace_back("baseline", baseline);
  finish(m, output + ".manifest.json");
  std::cout << s.str();
  return 0;
}

// --- emit-config -----------------------------------------------------------------

int run_emit_config(const std::string& profile_name, const std::string& output, const std::string& dataset) {
  const auto name = profile_from_string(profile_name);
  if (!name) throw ConfigError("unknown profile '" + profile_name + "'");
  const auto profile = make_profile(*name);
  write_text_file(output, render_config(profile, dataset));

  RunManifest m;
  m.command = "emit-config";
  m.outputs = {output};
  m.parameters.emplace_back("profile", std::string(to_string(*name)));
  m.parameters.emplace_back("dataset", dataset);
  finish(m, output + ".manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning-augmented classification pipeline"};
  app.set_version_flag("--version", std::string(RIFL_VERSION));
  app.require_subcommand(1);

  std::string input, output;
  std::uint64_t seed = 42;

  auto* transform = app.add_subcommand("transform", "Build stage-1 prompt/completion files with an 80/20 split");
  transform->add_option("--input", input, "Reasoning-triple JSONL")->required()->check(CLI::ExistingFile);
  transform->add_option("--output", output, "Output path prefix")->required();
  transform->add_option("--seed", seed, "Shuffle seed")->capture_default_str();

  BackendFlags augment_flags;
  std::size_t checkpoint_every = 500;
  auto* augment = app.add_subcommand("augment", "Generate reasonings and emit both training datasets");
  augment->add_option("--input", input, "Labeled training JSONL")->required()->check(CLI::ExistingFile);
  augment->add_option("--output", output, "Output path prefix")->required();
  augment->add_option("--checkpoint-every", checkpoint_every, "Examples per journal checkpoint")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  augment_flags.attach(augment);

  BackendFlags predict_flags;
  std::string predict_profile = "finetuned";
  auto* predict = app.add_subcommand("predict", "Generate a raw prediction for every test example");
  predict->add_option("--input", input, "Labeled test JSONL")->required()->check(CLI::ExistingFile);
  predict->add_option("--output", output, "Prediction JSONL")->required();
  predict->add_option("--profile", predict_profile, "Prompt profile")
      ->check(CLI::IsMember({"finetuned", "zeroshot"}))
      ->capture_default_str();
  predict_flags.attach(predict);

  std::string run_name, gold;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a prediction file");
  evaluate_cmd->add_option("--input", input, "Prediction JSONL")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--output", output, "Output path prefix")->required();
  evaluate_cmd->add_option("--name", run_name, "Run name (default: input file stem)");
  evaluate_cmd->add_option("--gold", gold, "Gold JSONL to cross-check ids and labels")->check(CLI::ExistingFile);

  std::vector<std::string> report_inputs;
  std::string proposed, baseline;
  auto* compare = app.add_subcommand("compare", "Compare evaluation reports");
  compare->add_option("--input", report_inputs, "Report JSON (repeat for each run)")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--output", output, "Markdown output file")->required();
  compare->add_option("--proposed", proposed, "Name of the proposed run")->required();
  compare->add_option("--baseline", baseline, "Name of the baseline run")->required();

  std::string config_profile, dataset = "train.jsonl";
  auto* emit = app.add_subcommand("emit-config", "Write a trainer configuration");
  emit->add_option("--profile", config_profile, "reasoning-gen or downstream")
      ->required()
      ->check(CLI::IsMember({"reasoning-gen", "reasoning_gen", "downstream"}));
  emit->add_option("--output", output, "Config file")->required();
  emit->add_option("--dataset", dataset, "Training dataset path written into the config")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*transform) return run_transform(input, output, seed);
    if (*augment) return run_augment(input, output, augment_flags, checkpoint_every);
    if (*predict) return run_predict(input, output, predict_profile, predict_flags);
    if (*evaluate_cmd) return run_evaluate(input, output, run_name, gold);
    if (*compare) return run_compare(report_inputs, output, proposed, baseline);
    if (*emit) return run_emit_config(config_profile, output, dataset);
  } catch (const ConfigError& e) {
    std::cerr << "rifl: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AuthenticationError& e) {
    std::cerr << "rifl: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "rifl: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
