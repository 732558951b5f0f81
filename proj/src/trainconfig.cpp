#include "rifl/trainconfig.hpp"

#include <ostream>
#include <sstream>

#include "rifl/error.hpp"

namespace rifl {

std::string_view to_string(ProfileName name) {
  return name == ProfileName::kReasoningGen ? "reasoning_gen" : "downstream";
}

std::optional<ProfileName> profile_from_string(std::string_view name) {
  if (name == "reasoning-gen" || name == "reasoning_gen") return ProfileName::kReasoningGen;
  if (name == "downstream") return ProfileName::kDownstream;
  return std::nullopt;
}

const ConfigEntry* TrainProfile::find(std::string_view key) const {
  for (const auto& e : settings) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

TrainProfile make_profile(ProfileName name) {
  const bool gen = name == ProfileName::kReasoningGen;
  const int grad_accum = 8;
  const int micro_batch = gen ? 1 : 2;
  using K = ConfigEntry::Kind;
  TrainProfile p;
  p.name = name;
  p.settings = {
      {"base_model", "Llama-3.2-1B-Instruct", K::kKey, "Base Model"},
      {"training_framework", "Axolotl", K::kComment, "Training Framework"},
      {"gpu", "NVIDIA A40", K::kComment, "GPU"},
      {"learning_rate", "2e-5", K::kKey, "Learning Rate"},
      {"optimizer", "paged_adamw_8bit", K::kKey, "Optimizer"},
      {"lr_scheduler", "cosine", K::kKey, "Learning Rate Scheduler"},
      {"warmup_steps", gen ? "100" : "10", K::kKey, "Warmup Steps"},
      {"weight_decay", "0.0", K::kKey, "Weight Decay"},
      {"gradient_accumulation_steps", std::to_string(grad_accum), K::kKey, "Gradient Accumulation Steps"},
      {"micro_batch_size", std::to_string(micro_batch), K::kKey, "Micro Batch Size (per device)"},
      {"effective_batch_size", std::to_string(grad_accum * micro_batch), K::kComment, "Effective Batch Size"},
      {"num_epochs", "1", K::kKey, "Num Epochs"},
      {"sequence_len", gen ? "16384" : "8192", K::kKey, "Max Sequence Length"},
      {"sample_packing", "true", K::kKey, "Sample Packing"},
      {"pad_to_sequence_len", "true", K::kKey, "Pad to Sequence Length"},
      {"bf16", "auto", K::kKey, "BF16"},
      {"tf32", "false", K::kKey, "TF32"},
      {"gradient_checkpointing", "true", K::kKey, "Gradient Checkpointing"},
      {"gradient_checkpointing_kwargs.use_reentrant", "false", K::kKey, "Gradient Checkpointing"},
      {"logging_steps", "1", K::kKey, "Logging Steps"},
      {"flash_attention", "true", K::kKey, "Flash Attention"},
      {"evals_per_epoch", "2", K::kKey, "Eval per Epoch"},
      {"saves_per_epoch", "1", K::kKey, "Saves per Epoch"},
      {"special_tokens.pad_token", "<|end_of_text|>", K::kKey, "Special Tokens"},
  };
  return p;
}

namespace {

std::string yaml_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string render_config(const TrainProfile& profile, std::string_view dataset_path) {
  std::ostringstream out;
  out << "# profile: " << to_string(profile.name) << '\n';
  std::string open_parent;
  for (const auto& e : profile.settings) {
    if (e.kind == ConfigEntry::Kind::kComment) {
      out << "# " << e.key << ": " << e.value;
      if (e.key == "effective_batch_size") {
        out << " (gradient_accumulation_steps x micro_batch_size x 1 device)";
      }
      out << '\n';
      continue;
    }
    const auto dot = e.key.find('.');
    if (dot == std::string::npos) {
      open_parent.clear();
      out << e.key << ": " << e.value << '\n';
    } else {
      const auto parent = e.key.substr(0, dot);
      if (parent != open_parent) {
        out << parent << ":\n";
        open_parent = parent;
      }
      out << "  " << e.key.substr(dot + 1) << ": " << e.value << '\n';
    }
    if (e.key == "base_model") {
      out << "datasets:\n";
      out << "  - path: " << yaml_quote(dataset_path) << '\n';
      out << "    ds_type: json\n";
    }
  }
  return out.str();
}

std::size_t emit_config(const TrainProfile& profile, std::string_view dataset_path, std::ostream& out) {
  const auto text = render_config(profile, dataset_path);
  out << text;
  if (!out) throw IoError("write failure");
  return text.size();
}

}  // namespace rifl
