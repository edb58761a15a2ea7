// Copyright 2026 The FedPDM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <fstream>
#include <vector>

#include <fmt/format.h>

#include "fedpdm/data.h"
#include "fedpdm/errors.h"

namespace fedpdm {
namespace {

std::uint32_t ReadBigEndianU32(std::istream& in,
                               const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw CorruptData(fmt::format("{}: truncated idx header", path.string()));
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::ifstream OpenBinary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  return in;
}

// Bytes remaining after the current read position.
std::uintmax_t Remaining(std::ifstream& in) {
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  in.seekg(here);
  return static_cast<std::uintmax_t>(end - here);
}

}  // namespace

Dataset LoadMnistPair(const std::filesystem::path& images,
                      const std::filesystem::path& labels) {
  auto img = OpenBinary(images);
  auto lab = OpenBinary(labels);

  if (const auto magic = ReadBigEndianU32(img, images);
      magic != kIdxImagesMagic) {
    throw CorruptData(fmt::format("{}: bad magic 0x{:08x}", images.string(), magic));
  }
  const std::uint32_t count = ReadBigEndianU32(img, images);
  const std::uint32_t rows = ReadBigEndianU32(img, images);
  const std::uint32_t cols = ReadBigEndianU32(img, images);

  if (const auto magic = ReadBigEndianU32(lab, labels);
      magic != kIdxLabelsMagic) {
    throw CorruptData(fmt::format("{}: bad magic 0x{:08x}", labels.string(), magic));
  }
  const std::uint32_t label_count = ReadBigEndianU32(lab, labels);
  if (label_count != count) {
    throw CorruptData(fmt::format("{} images but {} labels", count,
                                  label_count));
  }

  const std::size_t pixels = std::size_t{rows} * cols;
  if (Remaining(img) != std::uintmax_t{count} * pixels) {
    throw CorruptData(fmt::format("{}: payload length does not match header",
                                  images.string()));
  }
  if (Remaining(lab) != count) {
    throw CorruptData(fmt::format("{}: payload length does not match header",
                                  labels.string()));
  }

  Dataset out(pixels + 1, 10);
  out.Reserve(count);
  std::vector<unsigned char> raw(pixels);
  std::vector<double> features(pixels + 1, 1.0);
  for (std::uint32_t i = 0; i < count; ++i) {
    img.read(reinterpret_cast<char*>(raw.data()),
             static_cast<std::streamsize>(pixels));
    char label = 0;
    lab.read(&label, 1);
    if (!img || !lab) throw CorruptData("unexpected end of idx data");
    for (std::size_t p = 0; p < pixels; ++p) features[p] = raw[p] / 255.0;
    const auto l = static_cast<unsigned char>(label);
    if (l > 9) throw CorruptData(fmt::format("label {} out of range", l));
    out.Add(features, l);
  }
  return out;
}

TrainTest LoadMnist(const std::filesystem::path& dir) {
  return {LoadMnistPair(dir / "train-images-idx3-ubyte",
                        dir / "train-labels-idx1-ubyte"),
          LoadMnistPair(dir / "t10k-images-idx3-ubyte",
                        dir / "t10k-labels-idx1-ubyte")};
}

}  // namespace fedpdm
