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

#ifndef FEDPDM_ERRORS_H_
#define FEDPDM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fedpdm {

// Error categories surfaced by the library. The CLI maps kConfig to exit
// code 1 and everything else to exit code 2.
enum class ErrorKind {
  kInvalidInput,
  kConfig,
  kCorruptData,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error InvalidInput(const std::string& message) {
  return Error(ErrorKind::kInvalidInput, message);
}
inline Error ConfigError(const std::string& message) {
  return Error(ErrorKind::kConfig, message);
}
inline Error CorruptData(const std::string& message) {
  return Error(ErrorKind::kCorruptData, message);
}
inline Error IoError(const std::string& message) {
  return Error(ErrorKind::kIo, message);
}

const char* ErrorKindName(ErrorKind kind);

}  // namespace fedpdm

#endif  // FEDPDM_ERRORS_H_
