#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "manifest.hpp"
#include "settings.hpp"

namespace bvs::cli {

// State shared by one command invocation: resolved settings, output
// directory and the manifest being assembled.
class Context {
 public:
  Context(std::string command, Settings settings, std::ostream& log);

  const Settings& settings() const { return s_; }
  std::ostream& log() { return log_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }

  void add_input(const std::filesystem::path& path);
  void add_seed(const std::string& name, std::uint64_t seed);
  // Writes `content` to out_dir/name and records its digest.
  void write_output(const std::string& name, const std::string& content);
  // Writes <command>.manifest.json.
  void finish();

 private:
  Settings s_;
  std::ostream& log_;
  std::filesystem::path out_dir_;
  RunManifest manifest_;
};

void cmd_run(Context& ctx);
void cmd_report(Context& ctx);
void cmd_cv(Context& ctx);
void cmd_nested_curve(Context& ctx);
void cmd_baseline(Context& ctx);
void cmd_compare(Context& ctx);
void cmd_sensitivity(Context& ctx);
void cmd_leverage(Context& ctx);

}  // namespace bvs::cli
