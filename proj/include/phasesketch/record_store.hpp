#pragma once

#include <string>
#include <vector>

#include "phasesketch/vqe_engine.hpp"

namespace phasesketch {

inline constexpr int kFormatMajor = 1;
inline constexpr int kFormatMinor = 0;
std::string format_version();  // "1.0"

std::string record_to_json(const RunRecord& rec);
RunRecord record_from_json(const std::string& line);

/// Append-only JSONL store with a completion journal. A record only counts as
/// completed once its seed is journaled, so a run killed mid-write resumes
/// cleanly. Rejects stores written by an unknown format major.
class RecordStore {
 public:
  explicit RecordStore(std::string dir);

  std::vector<RunRecord> load() const;  // completed records, deduplicated by seed
  void append(const RunRecord& rec);    // flushes record and journal entry

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
};

}  // namespace phasesketch
