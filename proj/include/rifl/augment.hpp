#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rifl/corpus.hpp"
#include "rifl/genbackend.hpp"
#include "rifl/prompting.hpp"

namespace rifl {

/// One augmented example: the reasoning-target record and the label-only
/// record share system and user fields.
struct AugmentedPair {
  std::uint64_t example_id = 0;
  std::string reasoning;
  ChatRecord record_ra;
  ChatRecord record_a;
};

/// Throws DataError when the reasoning is blank.
AugmentedPair make_augmented_pair(const TextExample& example, const std::string& reasoning);

struct AugmentFailure {
  std::uint64_t id = 0;
  std::string error;

  friend bool operator==(const AugmentFailure&, const AugmentFailure&) = default;
};

struct AugmentOptions {
  DecodingOptions decoding;
  std::size_t max_in_flight = 8;
  std::size_t checkpoint_every = 500;
  /// Resumable progress log. Completed examples found here are not requested
  /// again; it is appended to after every checkpoint.
  std::optional<std::string> journal_path;
  std::function<void(std::size_t done, std::size_t total)> on_progress;
};

struct AugmentResult {
  std::vector<std::uint64_t> ids;  // example id of each emitted record pair
  std::vector<ChatRecord> ra_records;
  std::vector<ChatRecord> a_records;
  std::vector<AugmentFailure> failures;
  std::size_t requests_issued = 0;
};

/// Raised when the whole first batch of a run fails, which almost always
/// means a misconfigured backend.
class AugmentAborted : public Error {
 public:
  using Error::Error;
};

/// Requests a reasoning for every example through `generator` and builds both
/// training datasets. Failed examples are dropped from both outputs and listed
/// in `failures`; output order follows input order.
AugmentResult augment_dataset(std::span<const TextExample> examples, Generator& generator,
                              const AugmentOptions& options = {});

struct AlignmentReport {
  bool ok = true;
  std::optional<std::size_t> first_mismatch;
  std::string message;
};

/// Equal lengths, equal user fields, and every RA target ending in " " + the
/// matching label-only target.
AlignmentReport verify_alignment(std::span<const ChatRecord> ra_records, std::span<const ChatRecord> a_records);

}  // namespace rifl
