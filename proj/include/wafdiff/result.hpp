// Copyright (c) 2026 the wafdiff authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cassert>
#include <utility>
#include <variant>

namespace wafdiff {

// Minimal value-or-error type. Parsers return structured errors rather than
// throwing; T and E must be distinct types.
template <typename T, typename E>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(E error) : v_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    T &value() {
        assert(ok());
        return std::get<T>(v_);
    }
    const T &value() const {
        assert(ok());
        return std::get<T>(v_);
    }
    T &operator*() { return value(); }
    const T &operator*() const { return value(); }
    T *operator->() { return &value(); }
    const T *operator->() const { return &value(); }

    E &error() {
        assert(!ok());
        return std::get<E>(v_);
    }
    const E &error() const {
        assert(!ok());
        return std::get<E>(v_);
    }

private:
    std::variant<T, E> v_;
};

} // namespace wafdiff
