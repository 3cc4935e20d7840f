#include "translit/manifest.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "translit/error.hpp"
#include "translit/hash.hpp"

namespace translit {

RunManifest::RunManifest(std::string command) {
  entries_.emplace_back("command", std::move(command));
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
  entries_.emplace_back("timestamp_unix", std::to_string(secs.count()));
}

void RunManifest::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void RunManifest::set(const std::string& key, uint64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}

void RunManifest::set(const std::string& key, double value) {
  std::ostringstream os;
  os << value;
  entries_.emplace_back(key, os.str());
}

void RunManifest::add_file_digest(const std::string& role, const std::filesystem::path& file) {
  std::ostringstream os;
  os << std::hex << file_digest(file);
  entries_.emplace_back("digest." + role, file.string() + ":" + os.str());
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
}

uint64_t file_digest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string() + " for digest");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string bytes = ss.str();
  return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace translit
