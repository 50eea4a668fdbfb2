#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace bvs::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string version;
  std::string started_at;
  std::string finished_at;

  // SHA-256 over the command, the analytical config and the input digests.
  std::string config_hash() const;
  nlohmann::json to_json() const;
};

std::string utc_timestamp();

}  // namespace bvs::cli
