//! Binary container for wrapper models. All integers little-endian.
//!
//! ```text
//! "SAWM"              magic
//! u32                 format version
//! u32 u32 u8          width, height, encoding tag (0 bw, 1 rgb)
//! u8 u8               learner kind tag, task tag
//! u8 u32              max-depth present flag, max depth
//! u32 u32 f64         trees, epochs, lambda
//! u64                 base seed
//! u64                 output count L
//! L x (u64 len, payload)
//! ```
//!
//! Payloads by learner:
//!
//! * tree: u32 node count, then nodes in preorder; each node is a u8 flag
//!   followed by `u32 feature, f64 threshold` (flag 0, split) or
//!   `f64 value` (flag 1, leaf);
//! * forest: u32 tree count, then per tree a u64 length and a tree payload;
//! * perceptron / SVM: `d` weights then the bias, all f64.

use super::WrapperModel;
use crate::error::{Error, Result};
use crate::image::{Encoding, ImageSpec};
use crate::learners::{Forest, LearnerConfig, LearnerKind, LearnerModel, LinearModel, Node, Task, Tree};

pub const MAGIC: &[u8; 4] = b"SAWM";
pub const FORMAT_VERSION: u32 = 1;

const SPLIT: u8 = 0;
const LEAF: u8 = 1;

pub(super) fn encode(wm: &WrapperModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&wm.spec.width.to_le_bytes());
    out.extend_from_slice(&wm.spec.height.to_le_bytes());
    out.push(wm.spec.encoding.tag());
    let c = &wm.config;
    out.push(c.kind.tag());
    out.push(c.task.tag());
    out.push(u8::from(c.max_depth.is_some()));
    out.extend_from_slice(&c.max_depth.unwrap_or(0).to_le_bytes());
    out.extend_from_slice(&c.n_trees.to_le_bytes());
    out.extend_from_slice(&c.epochs.to_le_bytes());
    out.extend_from_slice(&c.lambda.to_le_bytes());
    out.extend_from_slice(&wm.base_seed.to_le_bytes());
    out.extend_from_slice(&(wm.models.len() as u64).to_le_bytes());
    let mut payload = Vec::new();
    for model in &wm.models {
        payload.clear();
        encode_model(model, &mut payload);
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&payload);
    }
    out
}

fn encode_model(model: &LearnerModel, out: &mut Vec<u8>) {
    match model {
        LearnerModel::Tree(t) => encode_tree(t, out),
        LearnerModel::Forest(f) => {
            out.extend_from_slice(&(f.trees().len() as u32).to_le_bytes());
            let mut buf = Vec::new();
            for t in f.trees() {
                buf.clear();
                encode_tree(t, &mut buf);
                out.extend_from_slice(&(buf.len() as u64).to_le_bytes());
                out.extend_from_slice(&buf);
            }
        }
        LearnerModel::Linear(l) => {
            for w in &l.weights {
                out.extend_from_slice(&w.to_le_bytes());
            }
            out.extend_from_slice(&l.bias.to_le_bytes());
        }
    }
}

fn encode_tree(tree: &Tree, out: &mut Vec<u8>) {
    out.extend_from_slice(&(tree.nodes().len() as u32).to_le_bytes());
    for node in tree.nodes() {
        match *node {
            Node::Split { feature, threshold, .. } => {
                out.push(SPLIT);
                out.extend_from_slice(&feature.to_le_bytes());
                out.extend_from_slice(&threshold.to_le_bytes());
            }
            Node::Leaf { value } => {
                out.push(LEAF);
                out.extend_from_slice(&value.to_le_bytes());
            }
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Truncated(format!(
                "needed {n} bytes for {what} at offset {}, {} left",
                self.pos,
                self.buf.len() - self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn finished(&self) -> bool {
        self.pos == self.buf.len()
    }
}

pub(super) fn decode(bytes: &[u8]) -> Result<WrapperModel> {
    if bytes.len() < MAGIC.len() {
        return Err(Error::Truncated("missing magic".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut r = Reader { buf: bytes, pos: 4 };
    let version = r.u32("version")?;
    if version > FORMAT_VERSION || version == 0 {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let width = r.u32("width")?;
    let height = r.u32("height")?;
    let encoding =
        Encoding::from_tag(r.u8("encoding")?).ok_or_else(|| Error::Malformed("unknown encoding tag".into()))?;
    let spec = ImageSpec::new(width, height, encoding).map_err(|e| Error::Malformed(e.to_string()))?;
    let kind =
        LearnerKind::from_tag(r.u8("learner kind")?).ok_or_else(|| Error::Malformed("unknown learner tag".into()))?;
    let task = Task::from_tag(r.u8("task")?).ok_or_else(|| Error::Malformed("unknown task tag".into()))?;
    let has_depth = r.u8("depth flag")? != 0;
    let depth = r.u32("max depth")?;
    let config = LearnerConfig {
        kind,
        task,
        max_depth: has_depth.then_some(depth),
        n_trees: r.u32("tree count")?,
        epochs: r.u32("epochs")?,
        lambda: r.f64("lambda")?,
    };
    config.validate().map_err(|e| Error::Malformed(e.to_string()))?;
    let base_seed = r.u64("base seed")?;
    let count = r.u64("output count")?;
    let d = spec.half_len();
    if count != d as u64 {
        return Err(Error::Malformed(format!("{count} outputs for a spec needing {d}")));
    }
    let mut models = Vec::with_capacity(d);
    for i in 0..d {
        let len = r.u64("payload length")? as usize;
        let payload = r.take(len, "model payload")?;
        let model = decode_model(kind, task, d, payload).map_err(|e| match e {
            Error::Truncated(m) => Error::Truncated(format!("model {i}: {m}")),
            Error::Malformed(m) => Error::Malformed(format!("model {i}: {m}")),
            other => other,
        })?;
        models.push(model);
    }
    if !r.finished() {
        return Err(Error::Malformed("trailing bytes after last model".into()));
    }
    Ok(WrapperModel {
        spec,
        config,
        base_seed,
        models,
    })
}

fn decode_model(kind: LearnerKind, task: Task, d: usize, payload: &[u8]) -> Result<LearnerModel> {
    let mut r = Reader { buf: payload, pos: 0 };
    let model = match kind {
        LearnerKind::DecisionTree => LearnerModel::Tree(decode_tree(&mut r, task, d)?),
        LearnerKind::RandomForest => {
            let n = r.u32("forest size")?;
            let mut trees = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let len = r.u64("tree length")? as usize;
                let mut sub = Reader {
                    buf: r.take(len, "tree payload")?,
                    pos: 0,
                };
                trees.push(decode_tree(&mut sub, task, d)?);
                if !sub.finished() {
                    return Err(Error::Malformed("tree payload has trailing bytes".into()));
                }
            }
            LearnerModel::Forest(
                Forest::from_trees(task, trees).ok_or_else(|| Error::Malformed("empty forest".into()))?,
            )
        }
        LearnerKind::Perceptron | LearnerKind::LinearSvm => {
            let mut weights = Vec::with_capacity(d);
            for _ in 0..d {
                weights.push(r.f64("weight")?);
            }
            let bias = r.f64("bias")?;
            LearnerModel::Linear(LinearModel { weights, bias })
        }
    };
    if !r.finished() {
        return Err(Error::Malformed("payload has trailing bytes".into()));
    }
    Ok(model)
}

fn decode_tree(r: &mut Reader<'_>, task: Task, d: usize) -> Result<Tree> {
    let count = r.u32("node count")? as usize;
    if count == 0 {
        return Err(Error::Malformed("tree without nodes".into()));
    }
    let mut nodes: Vec<Node> = Vec::with_capacity(count.min(1 << 20));
    // Splits still waiting for their right child, innermost on top.
    let mut open: Vec<usize> = Vec::new();
    for i in 0..count {
        if i > 0 && matches!(nodes[i - 1], Node::Leaf { .. }) {
            let parent = open
                .pop()
                .ok_or_else(|| Error::Malformed("preorder has extra nodes".into()))?;
            if let Node::Split { right, .. } = &mut nodes[parent] {
                *right = i as u32;
            }
        }
        match r.u8("node flag")? {
            SPLIT => {
                let feature = r.u32("feature")?;
                let threshold = r.f64("threshold")?;
                nodes.push(Node::Split {
                    feature,
                    threshold,
                    left: i as u32 + 1,
                    right: 0,
                });
                open.push(i);
            }
            LEAF => nodes.push(Node::Leaf {
                value: r.f64("leaf value")?,
            }),
            other => return Err(Error::Malformed(format!("unknown node flag {other}"))),
        }
    }
    if !open.is_empty() || matches!(nodes.last(), Some(Node::Split { .. })) {
        return Err(Error::Malformed("preorder ends inside a subtree".into()));
    }
    Tree::from_nodes(task, d, nodes).ok_or_else(|| Error::Malformed("invalid tree structure".into()))
}
