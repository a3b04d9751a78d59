#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "prnuda/grid.hpp"
#include "prnuda/model.hpp"

namespace prnuda {

// References a conv (weight, bias) pair inside a flat parameter vector.
struct ConvRef {
    std::size_t w_off = 0;
    std::size_t b_off = 0;
    int out_ch = 0;
    int in_ch = 0;
    int kernel = 0;
    int stride = 1;
    int pad = 0;
};
ConvRef conv_ref(const ModelState& m, const std::string& base, int stride, int pad);

// Reverse-mode accumulation over the fixed operation set the training loop
// needs: conv, ReLU, bilinear resize, channel concat, softmax-CE, sigmoid-BCE
// and custom scalar ops (cosine-similarity contrastive loss). Nodes are
// created in topological order; backward walks them in reverse.
//
// A tape is bound to exactly one flat parameter vector. Gradients w.r.t.
// parameters of any other model never exist on it, which is what realizes the
// mutual stop-gradient between the student and PRN objectives.
class Tape {
public:
    using NodeId = int;

    explicit Tape(const std::vector<double>& params, bool recording = true);

    bool recording() const { return recording_; }

    NodeId input(Grid2D value);
    NodeId scalar_input(double v);
    NodeId conv2d(NodeId x, const ConvRef& layer);
    NodeId relu(NodeId x);
    NodeId bilinear(NodeId x, int out_h, int out_w);
    NodeId concat(NodeId a, NodeId b);

    // sum_j weight[j] * (-log softmax(logits)_{labels_j}) / denom over pixels
    // with a non-ignore label. denom is the caller's normalization count.
    NodeId softmax_ce(NodeId logits, const LabelMap& labels,
                      std::vector<double> pixel_weight, double denom);

    // mean (over denom) of stable binary cross-entropy of sigmoid(logits)
    // against the 0/1 target mask.
    NodeId sigmoid_bce(NodeId logits, const NoiseMask& target, double denom);

    NodeId weighted_sum(const std::vector<std::pair<NodeId, double>>& terms);

    // Custom op: back receives this tape and the node id; it must read
    // grad_of(self) and accumulate into grad_accum(parent).
    using BackFn = std::function<void(Tape&, NodeId)>;
    NodeId custom(std::vector<NodeId> parents, Grid2D value, BackFn back);

    const Grid2D& value(NodeId id) const { return nodes_[id].val; }
    double scalar(NodeId id) const { return nodes_[id].val.data[0]; }
    const std::vector<NodeId>& parents(NodeId id) const { return nodes_[id].parents; }
    // True when a gradient path to the tape's parameters runs through the node.
    bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }

    // Valid during backward: gradient flowing into node id (zeros if untouched).
    const Grid2D& grad_of(NodeId id) const;
    // Gradient buffer of a node, allocated on first use.
    Grid2D& grad_accum(NodeId id);

    // d(scalar root)/d(params), accumulated (+=) into param_grad. Single use.
    void backward(NodeId root, std::vector<double>& param_grad);

    const std::vector<double>& params() const { return *params_; }
    std::vector<double>* param_grad() { return pgrad_; }

private:
    struct Node {
        Grid2D val;
        Grid2D grad;  // lazily allocated during backward
        std::vector<NodeId> parents;
        BackFn back;
        bool requires_grad = false;
    };

    NodeId push(Grid2D val, std::vector<NodeId> parents, BackFn back,
                bool force_requires_grad = false);

    const std::vector<double>* params_;
    std::vector<double>* pgrad_ = nullptr;
    std::vector<Node> nodes_;
    bool recording_ = true;
    bool backward_done_ = false;
};

}  // namespace prnuda
