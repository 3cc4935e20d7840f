#include "translit/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "translit/error.hpp"
#include "translit/hash.hpp"

namespace translit {

namespace {

constexpr char kMagic[4] = {'T', 'L', 'C', 'K'};
constexpr uint32_t kVersion = 1;

template <class T>
void put(std::string& buf, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  buf.append(raw, sizeof(T));
}

template <class T>
T take(const std::string& buf, size_t& off) {
  if (off + sizeof(T) > buf.size()) throw Error("checkpoint truncated");
  T value;
  std::memcpy(&value, buf.data() + off, sizeof(T));
  off += sizeof(T);
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params,
                     const Alphabet& source_alphabet, const Alphabet& target_alphabet) {
  std::string buf;
  buf.append(kMagic, 4);
  put<uint32_t>(buf, kVersion);
  put<uint64_t>(buf, source_alphabet.fingerprint());
  put<uint64_t>(buf, target_alphabet.fingerprint());
  ModelDims d = params.dims();
  put<uint32_t>(buf, static_cast<uint32_t>(d.source_vocab));
  put<uint32_t>(buf, static_cast<uint32_t>(d.target_vocab));
  put<uint32_t>(buf, static_cast<uint32_t>(d.embed_dim));
  put<uint32_t>(buf, static_cast<uint32_t>(d.hidden_dim));
  put<uint32_t>(buf, static_cast<uint32_t>(d.num_layers));

  size_t values = 0;
  visit_params(const_cast<ModelParams<float>&>(params),
               [&](const std::string&, const Mat<float>& m) {
                 for (Eigen::Index i = 0; i < m.rows(); ++i) {
                   for (Eigen::Index j = 0; j < m.cols(); ++j) put<float>(buf, m(i, j));
                 }
                 values += static_cast<size_t>(m.size());
               });
  put<uint64_t>(buf, fnv1a64(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.close();
  if (!out) throw Error("short write to " + path.string());

  std::ostringstream manifest;
  manifest << "format=TLCK\nversion=" << kVersion << "\n";
  manifest << std::hex;
  manifest << "source_alphabet_hash=" << source_alphabet.fingerprint() << "\n";
  manifest << "target_alphabet_hash=" << target_alphabet.fingerprint() << "\n";
  manifest << std::dec;
  manifest << "source_vocab=" << d.source_vocab << "\ntarget_vocab=" << d.target_vocab
           << "\nembed_dim=" << d.embed_dim << "\nhidden_dim=" << d.hidden_dim
           << "\nnum_layers=" << d.num_layers << "\nparameter_count=" << values << "\n";
  std::ofstream side(path.string() + ".manifest.txt", std::ios::binary | std::ios::trunc);
  side << manifest.str();
}

ModelParams<float> load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string buf = ss.str();

  if (buf.size() < 4 + 4 + 16 + 20 + 8) throw Error("checkpoint truncated: " + path.string());
  uint64_t stored_digest;
  std::memcpy(&stored_digest, buf.data() + buf.size() - 8, 8);
  if (fnv1a64(buf.data(), buf.size() - 8) != stored_digest) {
    throw Error("checkpoint corrupted (digest mismatch): " + path.string());
  }

  size_t off = 0;
  if (std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw Error("not a checkpoint file: " + path.string());
  }
  off = 4;
  CheckpointMeta m;
  m.version = take<uint32_t>(buf, off);
  if (m.version != kVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(m.version));
  }
  m.source_alphabet_hash = take<uint64_t>(buf, off);
  m.target_alphabet_hash = take<uint64_t>(buf, off);
  m.dims.source_vocab = static_cast<int>(take<uint32_t>(buf, off));
  m.dims.target_vocab = static_cast<int>(take<uint32_t>(buf, off));
  m.dims.embed_dim = static_cast<int>(take<uint32_t>(buf, off));
  m.dims.hidden_dim = static_cast<int>(take<uint32_t>(buf, off));
  m.dims.num_layers = static_cast<int>(take<uint32_t>(buf, off));

  ModelParams<float> params = zeros_like_params<float>(m.dims);
  visit_params(params, [&](const std::string&, Mat<float>& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) = take<float>(buf, off);
    }
  });
  if (off != buf.size() - 8) throw Error("checkpoint has trailing bytes: " + path.string());
  if (meta) *meta = m;
  return params;
}

void check_alphabets(const CheckpointMeta& meta, const Alphabet& source_alphabet,
                     const Alphabet& target_alphabet) {
  auto hex = [](uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
  };
  if (meta.source_alphabet_hash != source_alphabet.fingerprint()) {
    throw Error("source alphabet mismatch: checkpoint has " + hex(meta.source_alphabet_hash) +
                ", current is " + hex(source_alphabet.fingerprint()));
  }
  if (meta.target_alphabet_hash != target_alphabet.fingerprint()) {
    throw Error("target alphabet mismatch: checkpoint has " + hex(meta.target_alphabet_hash) +
                ", current is " + hex(target_alphabet.fingerprint()));
  }
}

}  // namespace translit
