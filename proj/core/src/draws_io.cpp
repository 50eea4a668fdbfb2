#include "bvs/draws_io.hpp"

#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "bvs/csv.hpp"
#include "bvs/error.hpp"

namespace bvs {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "bvs-draws";
constexpr int kFormatVersion = 1;

json chain_json(const ChainConfig& chain) {
  return json{{"iterations", chain.iterations},
              {"burn_in", chain.burn_in},
              {"thin", chain.thin},
              {"seed", chain.seed},
              {"move_mix", {{"add_delete", chain.move_mix.add_delete}, {"swap", chain.move_mix.swap}}},
              {"moves_per_sweep", chain.moves_per_sweep}};
}

ChainConfig chain_from(const json& doc) {
  ChainConfig chain;
  if (doc.contains("iterations")) chain.iterations = doc["iterations"].get<std::size_t>();
  if (doc.contains("burn_in")) chain.burn_in = doc["burn_in"].get<std::size_t>();
  if (doc.contains("thin")) chain.thin = doc["thin"].get<std::size_t>();
  if (doc.contains("seed")) chain.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("move_mix")) {
    chain.move_mix.add_delete = doc["move_mix"].value("add_delete", chain.move_mix.add_delete);
    chain.move_mix.swap = doc["move_mix"].value("swap", chain.move_mix.swap);
  }
  if (doc.contains("moves_per_sweep")) chain.moves_per_sweep = doc["moves_per_sweep"].get<std::size_t>();
  return chain;
}

}  // namespace

std::string chain_to_json(const ChainConfig& chain) { return chain_json(chain).dump(); }

ChainConfig chain_from_json(std::string_view json_text) {
  try {
    return chain_from(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("chain config: ") + e.what());
  }
}

void write_draws(std::ostream& os, const PosteriorDraws& draws) {
  json header;
  header["format"] = kFormatTag;
  header["version"] = kFormatVersion;
  header["factor_names"] = draws.factor_names;
  header["prior"] = json::parse(prior_to_json(draws.prior));
  header["chain"] = chain_json(draws.chain);
  header["seed"] = draws.telemetry.seed;
  header["draws"] = draws.size();
  header["telemetry"] = {
      {"add_delete", {{"proposed", draws.telemetry.add_delete.proposed}, {"accepted", draws.telemetry.add_delete.accepted}}},
      {"swap", {{"proposed", draws.telemetry.swap.proposed}, {"accepted", draws.telemetry.swap.accepted}}},
      {"rank_deficient_rejections", draws.telemetry.rank_deficient_rejections}};
  os << header.dump() << '\n';

  std::vector<std::string> columns;
  for (const auto& name : draws.factor_names) columns.push_back("gamma:" + name);
  columns.push_back("beta:(intercept)");
  for (const auto& name : draws.factor_names) columns.push_back("beta:" + name);
  csv::write_row(os, columns);

  const auto p = draws.num_factors();
  std::string line;
  for (std::size_t d = 0; d < draws.size(); ++d) {
    line.clear();
    for (std::size_t k = 0; k < p; ++k) {
      line += draws.gammas[d].test(k) ? '1' : '0';
      line += ',';
    }
    for (std::size_t j = 0; j <= p; ++j) {
      if (j) line += ',';
      line += csv::format_double(draws.betas(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)));
    }
    line += '\n';
    os << line;
  }
}

PosteriorDraws read_draws(std::istream& is) {
  std::string header_line;
  if (!std::getline(is, header_line)) throw DataError("draws artifact: empty file");
  json header;
  try {
    header = json::parse(header_line);
  } catch (const json::parse_error&) {
    throw DataError("draws artifact: first line is not a JSON header");
  }
  if (header.value("format", "") != kFormatTag) throw DataError("draws artifact: unrecognised format tag");

  PosteriorDraws draws;
  draws.factor_names = header["factor_names"].get<std::vector<std::string>>();
  draws.prior = prior_from_json(header["prior"].dump());
  draws.chain = chain_from(header["chain"]);
  draws.telemetry.seed = header.value("seed", draws.chain.seed);
  if (header.contains("telemetry")) {
    const auto& t = header["telemetry"];
    draws.telemetry.add_delete = {t["add_delete"]["proposed"].get<std::uint64_t>(),
                                  t["add_delete"]["accepted"].get<std::uint64_t>()};
    draws.telemetry.swap = {t["swap"]["proposed"].get<std::uint64_t>(), t["swap"]["accepted"].get<std::uint64_t>()};
    draws.telemetry.rank_deficient_rejections = t.value("rank_deficient_rejections", std::uint64_t{0});
  }

  std::ostringstream rest;
  rest << is.rdbuf();
  const csv::Table body = csv::parse(rest.str());
  const std::size_t p = draws.factor_names.size();
  if (body.header.size() != 2 * p + 1) throw DataError("draws artifact: column count does not match factor names");

  const std::size_t count = body.rows.size();
  if (header.contains("draws") && header["draws"].get<std::size_t>() != count)
    throw DataError("draws artifact: header draw count does not match body");
  draws.gammas.reserve(count);
  draws.betas.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(p + 1));
  for (std::size_t d = 0; d < count; ++d) {
    const auto& row = body.rows[d];
    std::vector<std::uint8_t> bits(p);
    for (std::size_t k = 0; k < p; ++k) {
      if (row[k] != "0" && row[k] != "1") throw DataError("draws artifact: gamma entries must be 0/1");
      bits[k] = row[k] == "1";
    }
    for (std::size_t j = 0; j <= p; ++j) {
      const auto v = csv::parse_double(row[p + j]);
      if (!v) throw DataError("draws artifact: bad coefficient '" + row[p + j] + "'");
      draws.betas(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)) = *v;
    }
    draws.gammas.emplace_back(std::move(bits));
  }
  return draws;
}

void save_draws(const std::filesystem::path& path, const PosteriorDraws& draws) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write draws artifact: " + path.string());
  write_draws(out, draws);
}

PosteriorDraws load_draws(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open draws artifact: " + path.string());
  return read_draws(in);
}

}  // namespace bvs
