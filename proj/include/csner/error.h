// Copyright 2026 The csner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CSNER_ERROR_H_
#define CSNER_ERROR_H_

#include <stdexcept>
#include <string>

namespace csner {

// All engine failures carry a stable error name (e.g. "UnknownLabel") that
// the CLI prints on standard error.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string &message)
      : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

  const std::string &name() const { return name_; }

 private:
  std::string name_;
};

#define CSNER_DEFINE_ERROR(Name)                               \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string &message)                  \
        : Error(#Name, message) {}                             \
  };

// schema
CSNER_DEFINE_ERROR(UnknownLabel)
CSNER_DEFINE_ERROR(OverlapError)
CSNER_DEFINE_ERROR(OutOfRange)
CSNER_DEFINE_ERROR(InvalidTransition)

// corpus
CSNER_DEFINE_ERROR(MalformedLine)
CSNER_DEFINE_ERROR(UnknownTag)
CSNER_DEFINE_ERROR(BadRatios)

// autodiff
CSNER_DEFINE_ERROR(ShapeMismatch)
CSNER_DEFINE_ERROR(NotScalar)

// encoders
CSNER_DEFINE_ERROR(DimMismatch)
CSNER_DEFINE_ERROR(BadConfig)

// crf
CSNER_DEFINE_ERROR(LengthMismatch)

// training and evaluation
CSNER_DEFINE_ERROR(Divergence)
CSNER_DEFINE_ERROR(AlignmentError)
CSNER_DEFINE_ERROR(TokenMismatch)

// persistence
CSNER_DEFINE_ERROR(VersionMismatch)
CSNER_DEFINE_ERROR(Corrupt)
CSNER_DEFINE_ERROR(IoError)

#undef CSNER_DEFINE_ERROR

}  // namespace csner

#endif  // CSNER_ERROR_H_
