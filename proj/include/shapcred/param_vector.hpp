#ifndef SHAPCRED_PARAM_VECTOR_HPP
#define SHAPCRED_PARAM_VECTOR_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "shapcred/errors.hpp"

namespace shapcred {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using MatMap = Eigen::Map< Mat >;
using ConstMatMap = Eigen::Map< const Mat >;

/// A named, contiguous slice of a parameter vector, viewed as a column-major matrix.
struct Segment {
   std::string name;
   std::size_t offset = 0;
   std::size_t rows = 0;
   std::size_t cols = 0;
   [[nodiscard]] std::size_t length() const noexcept { return rows * cols; }
};

/// Ordered segment index. Offsets partition [0, total) exactly.
class ParamLayout {
  public:
   std::size_t add(std::string name, std::size_t rows, std::size_t cols)
   {
      if(find(name) != nullptr) {
         throw ShapeError("ParamLayout: duplicate segment '" + name + "'");
      }
      segments_.push_back(Segment{std::move(name), total_, rows, cols});
      total_ += rows * cols;
      return segments_.size() - 1;
   }
   [[nodiscard]] std::size_t total() const noexcept { return total_; }
   [[nodiscard]] const std::vector< Segment >& segments() const noexcept { return segments_; }
   [[nodiscard]] const Segment* find(std::string_view name) const
   {
      for(const auto& s : segments_) {
         if(s.name == name) {
            return &s;
         }
      }
      return nullptr;
   }
   [[nodiscard]] const Segment& at(std::string_view name) const
   {
      const auto* s = find(name);
      if(s == nullptr) {
         throw ShapeError("ParamLayout: no segment named '" + std::string(name) + "'");
      }
      return *s;
   }
   friend bool operator==(const ParamLayout& a, const ParamLayout& b)
   {
      if(a.total_ != b.total_ || a.segments_.size() != b.segments_.size()) {
         return false;
      }
      for(std::size_t i = 0; i < a.segments_.size(); ++i) {
         const auto& x = a.segments_[i];
         const auto& y = b.segments_[i];
         if(x.name != y.name || x.offset != y.offset || x.rows != y.rows || x.cols != y.cols) {
            return false;
         }
      }
      return true;
   }

  private:
   std::vector< Segment > segments_;
   std::size_t total_ = 0;
};

/// Flat parameter storage plus its (shared, immutable) segment index.
class ParamVector {
  public:
   ParamVector() : layout_(std::make_shared< ParamLayout >()) {}
   explicit ParamVector(std::shared_ptr< const ParamLayout > layout)
       : layout_(std::move(layout)), data_(Vec::Zero(static_cast< Eigen::Index >(layout_->total())))
   {
   }

   [[nodiscard]] std::size_t size() const noexcept { return static_cast< std::size_t >(data_.size()); }
   [[nodiscard]] const ParamLayout& layout() const noexcept { return *layout_; }
   [[nodiscard]] const std::shared_ptr< const ParamLayout >& layout_ptr() const noexcept { return layout_; }

   Vec& data() noexcept { return data_; }
   [[nodiscard]] const Vec& data() const noexcept { return data_; }

   MatMap view(const Segment& s)
   {
      return {data_.data() + s.offset, static_cast< Eigen::Index >(s.rows), static_cast< Eigen::Index >(s.cols)};
   }
   [[nodiscard]] ConstMatMap view(const Segment& s) const
   {
      return {data_.data() + s.offset, static_cast< Eigen::Index >(s.rows), static_cast< Eigen::Index >(s.cols)};
   }
   MatMap operator[](std::string_view name) { return view(layout_->at(name)); }
   ConstMatMap operator[](std::string_view name) const { return view(layout_->at(name)); }

   /// A zero vector over the same layout.
   [[nodiscard]] ParamVector zeros_like() const { return ParamVector(layout_); }

   void set_zero() { data_.setZero(); }

  private:
   std::shared_ptr< const ParamLayout > layout_;
   Vec data_;
};

/// dst := src, bit for bit.
inline void copy_params(const ParamVector& src, ParamVector& dst)
{
   if(src.size() != dst.size()) {
      throw ShapeError(
         "copy_params: length mismatch (" + std::to_string(src.size()) + " vs " + std::to_string(dst.size())
         + ")");
   }
   dst.data() = src.data();
}

}  // namespace shapcred

#endif  // SHAPCRED_PARAM_VECTOR_HPP
