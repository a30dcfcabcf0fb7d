// Copyright 2026 The qtherm Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qtherm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QTHERM_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

QTHERM_DEFINE_ERROR(DimensionError)
QTHERM_DEFINE_ERROR(NotHermitianError)
QTHERM_DEFINE_ERROR(StateError)
QTHERM_DEFINE_ERROR(PovmError)
QTHERM_DEFINE_ERROR(WeightError)
QTHERM_DEFINE_ERROR(EmbeddingError)
QTHERM_DEFINE_ERROR(DomainError)
QTHERM_DEFINE_ERROR(NameError)
QTHERM_DEFINE_ERROR(IndistinguishableError)
QTHERM_DEFINE_ERROR(UnitaryError)
QTHERM_DEFINE_ERROR(EmptyChamberError)
QTHERM_DEFINE_ERROR(BasisError)
QTHERM_DEFINE_ERROR(SectorError)
QTHERM_DEFINE_ERROR(ShapeError)
QTHERM_DEFINE_ERROR(LedgerError)

#undef QTHERM_DEFINE_ERROR

}  // namespace qtherm
