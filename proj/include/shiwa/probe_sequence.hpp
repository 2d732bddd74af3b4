#pragma once

#include <coroutine>
#include <exception>
#include <utility>

#include "shiwa/core.hpp"

namespace shiwa {

// Coroutine that drives a sequential search written as straight-line code:
//
//   double f = co_yield x;   // suspends until the value of x is supplied
//
// next() resumes the search up to its next probe; answer() supplies the value
// the pending co_yield returns.
class ProbeSequence {
 public:
  struct promise_type {
    Vector probe;
    double value = 0.0;
    std::exception_ptr error;

    ProbeSequence get_return_object() {
      return ProbeSequence(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { error = std::current_exception(); }

    auto yield_value(Vector x) {
      probe = std::move(x);
      struct Awaiter {
        promise_type* self;
        bool await_ready() const noexcept { return false; }
        void await_suspend(std::coroutine_handle<>) const noexcept {}
        double await_resume() const noexcept { return self->value; }
      };
      return Awaiter{this};
    }
  };

  ProbeSequence() = default;
  explicit ProbeSequence(std::coroutine_handle<promise_type> handle) : handle_(handle) {}
  ProbeSequence(ProbeSequence&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  ProbeSequence& operator=(ProbeSequence&& other) noexcept {
    if (this != &other) {
      reset();
      handle_ = std::exchange(other.handle_, {});
    }
    return *this;
  }
  ProbeSequence(const ProbeSequence&) = delete;
  ProbeSequence& operator=(const ProbeSequence&) = delete;
  ~ProbeSequence() { reset(); }

  // Resumes the search and returns its next probe. Returns nullptr once the
  // search has finished.
  const Vector* next() {
    if (!handle_ || handle_.done()) return nullptr;
    handle_.resume();
    if (handle_.promise().error) std::rethrow_exception(handle_.promise().error);
    if (handle_.done()) return nullptr;
    return &handle_.promise().probe;
  }

  void answer(double value) { handle_.promise().value = value; }

 private:
  void reset() {
    if (handle_) handle_.destroy();
    handle_ = {};
  }

  std::coroutine_handle<promise_type> handle_;
};

}  // namespace shiwa
