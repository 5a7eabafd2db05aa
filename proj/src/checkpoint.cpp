#include "cfgx/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "cfgx/errors.hpp"

namespace cfgx {

using nlohmann::json;

static constexpr int kCheckpointVersion = 1;

std::string checkpoint_to_json(const Checkpoint& ck) {
  json j;
  j["format"] = "cfgx-checkpoint";
  j["version"] = kCheckpointVersion;
  j["kind"] = ck.kind;
  j["seed"] = ck.seed;
  j["config_hash"] = ck.config_hash;
  json tensors = json::object();
  for (const auto& [name, t] : ck.tensors) {
    tensors[name] = {{"shape", {t.rows, t.cols}}, {"data", t.data}};
  }
  j["tensors"] = std::move(tensors);
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("checkpoint: invalid JSON");
  if (!j.contains("format") || j["format"] != "cfgx-checkpoint")
    throw ValidationError("checkpoint: missing or wrong 'format' field");
  if (j.value("version", -1) != kCheckpointVersion)
    throw ValidationError("checkpoint: unsupported version");
  Checkpoint ck;
  ck.kind = j.value("kind", "");
  ck.seed = j.value("seed", std::uint64_t{0});
  ck.config_hash = j.value("config_hash", "");
  for (const auto& [name, tj] : j.at("tensors").items()) {
    auto shape = tj.at("shape");
    if (!shape.is_array() || shape.size() != 2)
      throw ValidationError("checkpoint: tensor '" + name + "' has bad shape");
    Tensor t(shape[0].get<std::size_t>(), shape[1].get<std::size_t>(),
             tj.at("data").get<std::vector<double>>());
    ck.tensors.emplace(name, std::move(t));
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << checkpoint_to_json(ck);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return checkpoint_from_json(text);
}

}  // namespace cfgx
