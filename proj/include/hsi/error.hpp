#pragma once

#include <stdexcept>
#include <string>

namespace hsi {

/// Base error for everything the toolkit can reject at runtime:
/// malformed files, shape mismatches, invalid configuration.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown by training when the loss stops being finite.
class TrainDivergence : public Error {
public:
    TrainDivergence(std::size_t epoch, const std::string& msg)
        : Error(msg), epoch_(epoch) {}
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

} // namespace hsi
