#include "celsa/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace celsa {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'E', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

template <typename SpMat>
void write_spem_impl(const std::string& path, const SpMat& M,
                     SparseLayout layout) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(M.rows()));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(M.cols()));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(M.nonZeros()));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(layout));
  for (Index i = 0; i <= M.outerSize(); ++i) {
    write_pod<std::uint64_t>(out,
                             static_cast<std::uint64_t>(M.outerIndexPtr()[i]));
  }
  for (Index i = 0; i < M.nonZeros(); ++i) {
    write_pod<std::uint32_t>(out,
                             static_cast<std::uint32_t>(M.innerIndexPtr()[i]));
  }
  out.write(reinterpret_cast<const char*>(M.valuePtr()),
            static_cast<std::streamsize>(M.nonZeros() * sizeof(float)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_spem(const std::string& path, const SpMatR& M) {
  SpMatR copy;
  const SpMatR* src = &M;
  if (!M.isCompressed()) {
    copy = M;
    copy.makeCompressed();
    src = &copy;
  }
  write_spem_impl(path, *src, SparseLayout::CSR);
}

void write_spem(const std::string& path, const SpMatC& M) {
  SpMatC copy;
  const SpMatC* src = &M;
  if (!M.isCompressed()) {
    copy = M;
    copy.makeCompressed();
    src = &copy;
  }
  write_spem_impl(path, *src, SparseLayout::CSC);
}

SpemContents read_spem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a SPEM file: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) {
    throw std::runtime_error("unsupported SPEM version " +
                             std::to_string(version));
  }
  const auto rows = static_cast<Index>(read_pod<std::uint64_t>(in));
  const auto cols = static_cast<Index>(read_pod<std::uint64_t>(in));
  const auto nnz = static_cast<Index>(read_pod<std::uint64_t>(in));
  const auto layout = static_cast<SparseLayout>(read_pod<std::uint32_t>(in));
  const Index outer = layout == SparseLayout::CSR ? rows : cols;

  std::vector<std::uint64_t> offsets(static_cast<size_t>(outer) + 1);
  in.read(reinterpret_cast<char*>(offsets.data()),
          static_cast<std::streamsize>(offsets.size() * sizeof(std::uint64_t)));
  std::vector<std::uint32_t> indices(static_cast<size_t>(nnz));
  in.read(reinterpret_cast<char*>(indices.data()),
          static_cast<std::streamsize>(indices.size() * sizeof(std::uint32_t)));
  std::vector<float> values(static_cast<size_t>(nnz));
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!in) throw std::runtime_error("truncated SPEM file: " + path);
  if (offsets.back() != static_cast<std::uint64_t>(nnz)) {
    throw std::runtime_error("inconsistent SPEM offsets: " + path);
  }

  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(static_cast<size_t>(nnz));
  for (Index o = 0; o < outer; ++o) {
    for (auto p = offsets[static_cast<size_t>(o)];
         p < offsets[static_cast<size_t>(o) + 1]; ++p) {
      const auto inner = static_cast<Index>(indices[static_cast<size_t>(p)]);
      const Index r = layout == SparseLayout::CSR ? o : inner;
      const Index c = layout == SparseLayout::CSR ? inner : o;
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(c),
                            values[static_cast<size_t>(p)]);
    }
  }
  SpemContents out;
  out.layout = layout;
  out.matrix.resize(rows, cols);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.matrix.makeCompressed();
  return out;
}

}  // namespace celsa
