#include "phasesketch/record_store.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace phasesketch {

namespace {

using nlohmann::json;

namespace fs = std::filesystem;

fs::path records_path(const std::string& dir) { return fs::path(dir) / "records.jsonl"; }
fs::path journal_path(const std::string& dir) { return fs::path(dir) / "journal.jsonl"; }

void check_version(const json& doc, const std::string& where) {
  const std::string v = doc.value("format_version", "");
  const auto dot = v.find('.');
  int major = -1;
  try {
    major = std::stoi(v.substr(0, dot));
  } catch (...) {
  }
  if (major != kFormatMajor)
    throw std::runtime_error(where + ": unsupported format version '" + v + "'");
}

}  // namespace

std::string format_version() {
  return std::to_string(kFormatMajor) + "." + std::to_string(kFormatMinor);
}

std::string record_to_json(const RunRecord& rec) {
  json doc;
  doc["format_version"] = format_version();
  doc["model_kind"] = rec.model_kind;
  doc["lattice_size"] = rec.lattice_size;
  doc["g"] = rec.g;
  doc["p"] = rec.p;
  doc["seed"] = rec.seed;
  doc["init_strategy"] = to_string(rec.init_strategy);
  doc["theta_final"] = rec.theta_final;
  doc["sub_expectations"] = rec.sub_expectations;
  doc["energy"] = rec.energy;
  doc["order_params"] = rec.order_params;
  doc["iterations"] = rec.iterations;
  doc["grad_norm_final"] = rec.grad_norm_final;
  doc["converged"] = rec.converged;
  doc["wall_time"] = rec.wall_time;
  doc["best"] = rec.best;
  if (rec.exact_e0) {
    doc["exact_ref"]["e0"] = *rec.exact_e0;
    doc["exact_ref"]["fidelity"] = rec.exact_fidelity.value_or(0.0);
  }
  return doc.dump();
}

RunRecord record_from_json(const std::string& line) {
  const json doc = json::parse(line);
  check_version(doc, "record");
  RunRecord rec;
  rec.model_kind = doc.at("model_kind").get<std::string>();
  rec.lattice_size = doc.at("lattice_size").get<int>();
  rec.g = doc.at("g").get<double>();
  rec.p = doc.at("p").get<int>();
  rec.seed = doc.at("seed").get<std::uint64_t>();
  rec.init_strategy = init_strategy_from_string(doc.at("init_strategy").get<std::string>());
  rec.theta_final = doc.at("theta_final").get<std::vector<double>>();
  rec.sub_expectations = doc.at("sub_expectations").get<std::vector<double>>();
  rec.energy = doc.at("energy").get<double>();
  rec.order_params = doc.at("order_params").get<std::map<std::string, double>>();
  rec.iterations = doc.at("iterations").get<int>();
  rec.grad_norm_final = doc.at("grad_norm_final").get<double>();
  rec.converged = doc.at("converged").get<bool>();
  rec.wall_time = doc.at("wall_time").get<double>();
  rec.best = doc.value("best", false);
  if (doc.contains("exact_ref")) {
    rec.exact_e0 = doc["exact_ref"].at("e0").get<double>();
    rec.exact_fidelity = doc["exact_ref"].at("fidelity").get<double>();
  }
  return rec;
}

RecordStore::RecordStore(std::string dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

std::vector<RunRecord> RecordStore::load() const {
  std::unordered_set<std::uint64_t> completed;
  if (std::ifstream journal{journal_path(dir_)}) {
    std::string line;
    while (std::getline(journal, line)) {
      if (line.empty()) continue;
      try {
        const json entry = json::parse(line);
        check_version(entry, "journal");
        completed.insert(entry.at("seed").get<std::uint64_t>());
      } catch (const json::exception&) {
        break;  // torn tail from an interrupted run
      }
    }
  }

  std::vector<RunRecord> out;
  std::unordered_set<std::uint64_t> seen;
  if (std::ifstream in{records_path(dir_)}) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      RunRecord rec;
      try {
        rec = record_from_json(line);
      } catch (const json::exception&) {
        break;  // torn tail
      }
      if (!completed.count(rec.seed) || !seen.insert(rec.seed).second) continue;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

void RecordStore::append(const RunRecord& rec) {
  {
    std::ofstream out(records_path(dir_), std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + records_path(dir_).string());
    out << record_to_json(rec) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failed on " + records_path(dir_).string());
  }
  json entry;
  entry["format_version"] = format_version();
  entry["seed"] = rec.seed;
  entry["g"] = rec.g;
  entry["p"] = rec.p;
  entry["stage"] = to_string(rec.init_strategy);
  std::ofstream journal(journal_path(dir_), std::ios::app);
  if (!journal) throw std::runtime_error("cannot write " + journal_path(dir_).string());
  journal << entry.dump() << '\n';
  journal.flush();
  if (!journal) throw std::runtime_error("write failed on " + journal_path(dir_).string());
}

}  // namespace phasesketch
