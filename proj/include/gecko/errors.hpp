#pragma once

#include <stdexcept>
#include <string>

namespace gecko {

// Base class for all simulator errors.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// --- NAND layer ---
class NonSequentialWrite : public SimError {
public:
    using SimError::SimError;
};
class WriteToFreeBlock : public SimError {
public:
    using SimError::SimError;
};
class ReadUnwritten : public SimError {
public:
    using SimError::SimError;
};
class EraseActiveBlock : public SimError {
public:
    using SimError::SimError;
};
class OutOfFreeBlocks : public SimError {
public:
    using SimError::SimError;
};

// --- mapping layer ---
class UnmappedLba : public SimError {
public:
    using SimError::SimError;
};

// --- garbage collection ---
class NoVictim : public SimError {
public:
    using SimError::SimError;
};
class EmptyQueue : public SimError {
public:
    using SimError::SimError;
};

// --- configuration / harness ---
class ConfigError : public SimError {
public:
    using SimError::SimError;
};
class UnsupportedGeometry : public SimError {
public:
    using SimError::SimError;
};
class InsufficientRam : public SimError {
public:
    using SimError::SimError;
};
class TraceParseError : public SimError {
public:
    TraceParseError(const std::string& what, std::size_t line)
        : SimError(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};

} // namespace gecko
