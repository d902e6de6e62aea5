#pragma once

#include "celsa/types.hpp"

#include <string>

namespace celsa {

enum class SparseLayout : std::uint32_t { CSR = 0, CSC = 1 };

// Binary sparse matrix file, little-endian:
//   magic "SPEM", version u32, rows u64, cols u64, nnz u64, layout u32,
//   offsets u64[outer+1], indices u32[nnz], values f32[nnz].
void write_spem(const std::string& path, const SpMatR& M);
void write_spem(const std::string& path, const SpMatC& M);

struct SpemContents {
  SparseLayout layout;
  SpMatR matrix;  // CSC input is converted; triplet set is preserved
};

SpemContents read_spem(const std::string& path);

}  // namespace celsa
