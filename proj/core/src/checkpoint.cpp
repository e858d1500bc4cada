#include "tdet/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "tdet/io.hpp"

namespace tdet {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "TDETCKPT";

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are stored little-endian");

template <class T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw Error(ErrorKind::truncation, "checkpoint is truncated");
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

json directory(const Params& p) {
  json arr = json::array();
  for (const auto& t : p.tensors()) {
    arr.push_back({{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}});
  }
  return arr;
}

void append_payload(std::string& out, const Params& p) {
  for (const auto& t : p.tensors()) {
    out.append(reinterpret_cast<const char*>(t.value.data()),
               static_cast<std::size_t>(t.value.size()) * sizeof(double));
  }
}

Params read_params(const json& dir, std::string_view bytes, std::size_t& pos) {
  Params p;
  for (const auto& entry : dir) {
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    if (rows < 0 || cols < 0) throw Error(ErrorKind::format, "negative tensor shape in checkpoint");
    const auto n = static_cast<std::size_t>(rows * cols) * sizeof(double);
    if (pos + n > bytes.size()) throw Error(ErrorKind::truncation, "checkpoint tensor data is truncated");
    MatrixD m(rows, cols);
    if (n) std::memcpy(m.data(), bytes.data() + pos, n);
    pos += n;
    p.add(entry.at("name").get<std::string>(), std::move(m));
  }
  return p;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  json header;
  header["version"] = kCheckpointVersion;
  header["head"] = ck.head;
  header["config"] = ck.config;
  header["vocabulary"] = ck.vocabulary;
  header["tensors"] = directory(ck.params);
  if (ck.optimizer) {
    if (!ck.optimizer->m.same_shape(ck.params) || !ck.optimizer->v.same_shape(ck.params)) {
      throw Error(ErrorKind::shape, "optimizer moments do not match the parameters");
    }
    header["optimizer"] = {{"kind", "adam"}, {"step", ck.optimizer->step}};
  } else {
    header["optimizer"] = nullptr;
  }
  const std::string text = header.dump();

  std::string out;
  out.append(kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out.append(text);
  append_payload(out, ck.params);
  if (ck.optimizer) {
    append_payload(out, ck.optimizer->m);
    append_payload(out, ck.optimizer->v);
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorKind::format, "not a tdet checkpoint (bad magic)");
  }
  std::size_t pos = kMagic.size();
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::format, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = get<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) throw Error(ErrorKind::truncation, "checkpoint header is truncated");
  json header;
  try {
    header = json::parse(bytes.substr(pos, header_len));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("checkpoint header: ") + e.what());
  }
  pos += header_len;

  Checkpoint ck;
  try {
    if (header.at("version").get<std::uint32_t>() != version) {
      throw Error(ErrorKind::format, "checkpoint header version disagrees with the prelude");
    }
    ck.head = header.at("head").get<std::string>();
    ck.config = header.at("config");
    ck.vocabulary = header.at("vocabulary").get<std::vector<std::string>>();
    ck.params = read_params(header.at("tensors"), bytes, pos);
    const auto& opt = header.at("optimizer");
    if (!opt.is_null()) {
      AdamState st;
      st.step = opt.at("step").get<long>();
      st.m = read_params(header.at("tensors"), bytes, pos);
      st.v = read_params(header.at("tensors"), bytes, pos);
      ck.optimizer = std::move(st);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("checkpoint header: ") + e.what());
  }
  if (pos != bytes.size()) throw Error(ErrorKind::format, "trailing bytes after checkpoint payload");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path));
}

json encoder_config_to_json(const EncoderConfig& c) {
  return {{"num_layers", c.num_layers}, {"num_heads", c.num_heads},   {"model_dim", c.model_dim},
          {"hidden_dim", c.hidden_dim}, {"input_dim", c.input_dim},   {"output_dim", c.output_dim},
          {"dropout_p", c.dropout_p},   {"num_segments", c.num_segments}};
}

EncoderConfig encoder_config_from_json(const json& j) {
  EncoderConfig c;
  try {
    c.num_layers = j.at("num_layers").get<int>();
    c.num_heads = j.at("num_heads").get<int>();
    c.model_dim = j.at("model_dim").get<int>();
    c.hidden_dim = j.at("hidden_dim").get<int>();
    c.input_dim = j.at("input_dim").get<int>();
    c.output_dim = j.at("output_dim").get<int>();
    c.dropout_p = j.at("dropout_p").get<double>();
    c.num_segments = j.value("num_segments", 0);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("encoder config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace tdet
