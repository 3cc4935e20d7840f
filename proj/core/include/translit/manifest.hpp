#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace translit {

// Reproducibility record written next to every command's outputs: the
// command line, the effective configuration, the root seed, and digests of
// every input and output file. Timestamps live only here, so the data
// artifacts themselves stay byte-comparable across reruns.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, uint64_t value);
  void set(const std::string& key, double value);
  void add_file_digest(const std::string& role, const std::filesystem::path& file);

  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

uint64_t file_digest(const std::filesystem::path& file);

}  // namespace translit
