use super::layout::{complement, offsets, strides};
use super::{
    c, check_cap, dims, left_apply, max_abs, positions, total_dim, validate_labels, CMatrix, DensityOperator,
    Subsystem, COMPLETENESS_TOL,
};
use crate::error::{Error, Result};

/// A CPTP map in Kraus form between labeled input and output factors.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    inputs: Vec<Subsystem>,
    outputs: Vec<Subsystem>,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    /// Validating constructor; rejects Kraus sets whose completeness residual
    /// `max|Σ K†K − 1|` exceeds 1e-9.
    pub fn new(inputs: Vec<Subsystem>, outputs: Vec<Subsystem>, kraus: Vec<CMatrix>) -> Result<Self> {
        let ch = Self::from_parts(inputs, outputs, kraus)?;
        let residual = ch.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(ch)
    }

    pub(crate) fn from_parts(inputs: Vec<Subsystem>, outputs: Vec<Subsystem>, kraus: Vec<CMatrix>) -> Result<Self> {
        validate_labels(&inputs)?;
        validate_labels(&outputs)?;
        let din = total_dim(&inputs);
        let dout = total_dim(&outputs);
        check_cap(din)?;
        check_cap(dout)?;
        if kraus.is_empty() {
            return Err(Error::Dimension("empty Kraus set".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::Dimension(format!(
                    "Kraus operator {i} is {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        Ok(Self { inputs, outputs, kraus })
    }

    pub fn identity(labels: Vec<Subsystem>) -> Result<Self> {
        let d = total_dim(&labels);
        Self::new(labels.clone(), labels, vec![CMatrix::identity(d, d)])
    }

    /// Noiseless transfer of `from` onto a factor named `to`.
    pub fn wire(from: &Subsystem, to: &str) -> Result<Self> {
        Self::new(vec![from.clone()], vec![from.renamed(to)], vec![CMatrix::identity(from.dim, from.dim)])
    }

    pub fn unitary(labels: Vec<Subsystem>, u: CMatrix) -> Result<Self> {
        Self::new(labels.clone(), labels, vec![u])
    }

    pub fn inputs(&self) -> &[Subsystem] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Subsystem] {
        &self.outputs
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        total_dim(&self.inputs)
    }

    pub fn output_dim(&self) -> usize {
        total_dim(&self.outputs)
    }

    pub fn output(&self, name: &str) -> Option<&Subsystem> {
        self.outputs.iter().find(|l| l.name == name)
    }

    pub fn input(&self, name: &str) -> Option<&Subsystem> {
        self.inputs.iter().find(|l| l.name == name)
    }

    pub fn completeness_residual(&self) -> f64 {
        let d = self.input_dim();
        let mut acc = CMatrix::zeros(d, d);
        for k in &self.kraus {
            acc += k.adjoint() * k;
        }
        for i in 0..d {
            acc[(i, i)] -= c(1.0, 0.0);
        }
        max_abs(&acc)
    }

    /// Parallel composition; inputs and outputs are concatenated.
    pub fn tensor(&self, other: &QuantumChannel) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        inputs.extend(other.inputs.iter().cloned());
        let mut outputs = self.outputs.clone();
        outputs.extend(other.outputs.iter().cloned());
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        Self::from_parts(inputs, outputs, kraus)
    }

    /// `next ∘ self`: `next` acts on a subset of this channel's outputs, the
    /// untouched outputs pass through.
    pub fn then(&self, next: &QuantumChannel) -> Result<Self> {
        let pos = positions(&self.outputs, &next.input_names())?;
        for (p, l) in pos.iter().zip(&next.inputs) {
            if self.outputs[*p].dim != l.dim {
                return Err(Error::Dimension(format!("factor `{}` changes dimension between channels", l.name)));
            }
        }
        let mut outputs = None;
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for k1 in &self.kraus {
            for k2 in &next.kraus {
                let (labels, k) = left_apply(k2, &self.outputs, &pos, &next.outputs, k1);
                outputs.get_or_insert(labels);
                kraus.push(k);
            }
        }
        Self::from_parts(self.inputs.clone(), outputs.unwrap_or_default(), kraus)
    }

    /// Same channel with outputs listed in `order`.
    pub fn reorder_outputs<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let pos = positions(&self.outputs, order)?;
        if pos.len() != self.outputs.len() {
            return Err(Error::Dimension("output reorder must list every output".into()));
        }
        let d = dims(&self.outputs);
        let map = offsets(&d, &pos);
        let kraus = self
            .kraus
            .iter()
            .map(|k| CMatrix::from_fn(k.nrows(), k.ncols(), |i, j| k[(map[i], j)]))
            .collect();
        let outputs = pos.iter().map(|&p| self.outputs[p].clone()).collect();
        Self::from_parts(self.inputs.clone(), outputs, kraus)
    }

    /// Same channel with inputs listed in `order`.
    pub fn reorder_inputs<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let pos = positions(&self.inputs, order)?;
        if pos.len() != self.inputs.len() {
            return Err(Error::Dimension("input reorder must list every input".into()));
        }
        let d = dims(&self.inputs);
        let map = offsets(&d, &pos);
        let kraus = self
            .kraus
            .iter()
            .map(|k| CMatrix::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, map[j])]))
            .collect();
        let inputs = pos.iter().map(|&p| self.inputs[p].clone()).collect();
        Self::from_parts(inputs, self.outputs.clone(), kraus)
    }

    pub fn rename_output(&self, from: &str, to: &str) -> Result<Self> {
        let p = positions(&self.outputs, &[from])?[0];
        let mut outputs = self.outputs.clone();
        outputs[p].name = to.to_string();
        Self::from_parts(self.inputs.clone(), outputs, self.kraus.clone())
    }

    /// Feed fixed computational-basis states into some inputs and discard some
    /// outputs. The result is CPTP for any channel.
    pub fn restrict<S: AsRef<str>>(&self, fixed_inputs: &[(S, usize)], traced_outputs: &[S]) -> Result<Self> {
        let in_dims = dims(&self.inputs);
        let out_dims = dims(&self.outputs);
        let fixed_names: Vec<&str> = fixed_inputs.iter().map(|(n, _)| n.as_ref()).collect();
        let fpos = positions(&self.inputs, &fixed_names)?;
        let tpos = positions(&self.outputs, traced_outputs)?;
        let in_st = strides(&in_dims);
        let mut fixed_off = 0;
        for ((_, idx), &p) in fixed_inputs.iter().zip(&fpos) {
            if *idx >= in_dims[p] {
                return Err(Error::Dimension(format!("basis index {idx} out of range for `{}`", self.inputs[p].name)));
            }
            fixed_off += idx * in_st[p];
        }
        let keep_in = complement(in_dims.len(), &fpos);
        let keep_out = complement(out_dims.len(), &tpos);
        let mi = offsets(&in_dims, &keep_in);
        let mo = offsets(&out_dims, &keep_out);
        let mt = offsets(&out_dims, &tpos);
        let mut kraus = Vec::new();
        for k in &self.kraus {
            for &t in &mt {
                let kk = CMatrix::from_fn(mo.len(), mi.len(), |i, j| k[(mo[i] + t, mi[j] + fixed_off)]);
                if kk.iter().any(|z| z.norm() > 0.0) {
                    kraus.push(kk);
                }
            }
        }
        if kraus.is_empty() {
            kraus.push(CMatrix::zeros(mo.len(), mi.len()));
        }
        let inputs = keep_in.iter().map(|&p| self.inputs[p].clone()).collect();
        let outputs = keep_out.iter().map(|&p| self.outputs[p].clone()).collect();
        Self::from_parts(inputs, outputs, kraus)
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.inputs.iter().map(|l| l.name.as_str()).collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs.iter().map(|l| l.name.as_str()).collect()
    }

    /// Act on the factors of `rho` named by this channel's inputs, identity
    /// elsewhere. Output factors take the place of the first input factor.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let pos = positions(rho.labels(), &self.input_names())?;
        for (p, l) in pos.iter().zip(&self.inputs) {
            if rho.labels()[*p].dim != l.dim {
                return Err(Error::Dimension(format!(
                    "factor `{}` has dimension {} but the channel expects {}",
                    l.name,
                    rho.labels()[*p].dim,
                    l.dim
                )));
            }
        }
        let rest_dim = rho.dim() / self.input_dim();
        check_cap(rest_dim * self.output_dim())?;
        let mut labels = Vec::new();
        let mut acc: Option<CMatrix> = None;
        for k in &self.kraus {
            let (nl, left) = left_apply(k, rho.labels(), &pos, &self.outputs, rho.matrix());
            let (_, both) = left_apply(k, rho.labels(), &pos, &self.outputs, &left.adjoint());
            labels = nl;
            match acc.as_mut() {
                Some(a) => *a += both,
                None => acc = Some(both),
            }
        }
        DensityOperator::from_parts(labels, acc.expect("non-empty Kraus set"))
    }

    /// Choi state `(id ⊗ N)(Φ)` with Φ maximally entangled between reference
    /// copies `R_<name>` of the inputs and the inputs. Factor order is the
    /// references followed by the outputs.
    pub fn choi_state(&self) -> Result<DensityOperator> {
        let din = self.input_dim();
        let dout = self.output_dim();
        check_cap(din * dout)?;
        let mut labels: Vec<Subsystem> = self.inputs.iter().map(|l| l.renamed(reference_name(&l.name))).collect();
        labels.extend(self.outputs.iter().cloned());
        let scale = 1.0 / (din as f64).sqrt();
        let mut v = CMatrix::zeros(din * dout, self.kraus.len());
        for (i, k) in self.kraus.iter().enumerate() {
            for r in 0..din {
                for o in 0..dout {
                    v[(r * dout + o, i)] = k[(o, r)] * scale;
                }
            }
        }
        DensityOperator::from_parts(labels, &v * v.adjoint())
    }
}

/// Name of the Choi reference copy of input `name`.
pub fn reference_name(name: &str) -> String {
    format!("R_{name}")
}

#[cfg(test)]
mod tests {
    use super::super::{basis_ket, hermitian_eigenvalues, identity, kron, paulis, CVector, C64};
    use super::*;

    fn q(name: &str, d: usize) -> Subsystem {
        Subsystem::quantum(name, d)
    }

    pub(crate) fn depolarizing(name: &str, out: &str, q_: f64) -> QuantumChannel {
        let p = paulis();
        let mut ks = vec![p[0].scale((1.0 - 0.75 * q_).sqrt())];
        for m in &p[1..] {
            ks.push(m.scale((q_ / 4.0).sqrt()));
        }
        QuantumChannel::new(vec![q(name, 2)], vec![q(out, 2)], ks).unwrap()
    }

    #[test]
    fn identity_channel_is_noop() {
        let v = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let rho = DensityOperator::pure(vec![q("A", 2)], &v).unwrap();
        let id = QuantumChannel::identity(vec![q("A", 2)]).unwrap();
        let out = id.apply(&rho).unwrap();
        assert!(max_abs(&(out.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn depolarizing_on_zero() {
        let qv = 0.3;
        let ch = depolarizing("D", "B2", qv);
        let out = ch.apply(&DensityOperator::basis(q("D", 2), 0).unwrap()).unwrap();
        assert_eq!(out.names(), ["B2"]);
        assert!((out.matrix()[(0, 0)].re - (1.0 - qv / 2.0)).abs() < 1e-15);
        assert!((out.matrix()[(1, 1)].re - qv / 2.0).abs() < 1e-15);
        assert!(out.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn rejects_non_trace_preserving_kraus() {
        let k = identity(2).scale(0.9);
        match QuantumChannel::new(vec![q("A", 2)], vec![q("B", 2)], vec![k]) {
            Err(Error::NotTracePreserving { residual }) => assert!((residual - 0.19).abs() < 1e-12),
            other => panic!("expected residual error, got {other:?}"),
        }
    }

    #[test]
    fn apply_acts_on_named_factor_only() {
        let rho = DensityOperator::basis(q("A", 2), 0)
            .unwrap()
            .tensor(&DensityOperator::basis(q("B", 2), 0).unwrap())
            .unwrap();
        let flip = QuantumChannel::unitary(vec![q("B", 2)], paulis()[1].clone()).unwrap();
        let out = flip.apply(&rho).unwrap();
        assert_eq!(out.names(), ["A", "B"]);
        assert!((out.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn choi_of_identity_is_bell_state() {
        let id = QuantumChannel::identity(vec![q("A", 2)]).unwrap();
        let xi = id.choi_state().unwrap();
        assert_eq!(xi.names(), ["R_A", "A"]);
        let phi = (basis_ket(4, 0) + basis_ket(4, 3)).unscale(2f64.sqrt());
        assert!(max_abs(&(xi.matrix() - &phi * phi.adjoint())) < 1e-15);
    }

    #[test]
    fn choi_of_completely_depolarizing() {
        // brute force: Kraus {I,X,Y,Z}/2
        let ks: Vec<CMatrix> = paulis().iter().map(|p| p.scale(0.5)).collect();
        let ch = QuantumChannel::new(vec![q("A", 2)], vec![q("B", 2)], ks).unwrap();
        let xi = ch.choi_state().unwrap();
        assert!(max_abs(&(xi.matrix() - identity(4).unscale(4.0))) < 1e-15);
    }

    #[test]
    fn restrict_extracts_marginal_channel() {
        let a = depolarizing("A", "B1", 0.2);
        let d = depolarizing("D", "B2", 0.7);
        let n = a.tensor(&d).unwrap();
        let m = n.restrict(&[("D", 0)], &["B2"]).unwrap();
        assert!(m.completeness_residual() < 1e-12);
        let rho = DensityOperator::basis(q("A", 2), 1).unwrap();
        let want = a.apply(&rho).unwrap();
        let got = m.apply(&rho).unwrap();
        assert!(max_abs(&(want.matrix() - got.matrix())) < 1e-14);
    }

    #[test]
    fn then_composes_on_subset() {
        let swap = {
            let mut u = CMatrix::zeros(4, 4);
            for i in 0..2 {
                for j in 0..2 {
                    u[(j * 2 + i, i * 2 + j)] = C64::new(1.0, 0.0);
                }
            }
            QuantumChannel::unitary(vec![q("A", 2), q("B", 2)], u).unwrap()
        };
        let dep = depolarizing("B", "C", 1.0);
        let comp = swap.then(&dep).unwrap();
        assert_eq!(comp.output_names(), ["A", "C"]);
        let rho = DensityOperator::basis(q("A", 2), 1)
            .unwrap()
            .tensor(&DensityOperator::basis(q("B", 2), 0).unwrap())
            .unwrap();
        let out = comp.apply(&rho).unwrap();
        // A now holds |0>, C is maximally mixed
        let want = kron(&super::super::basis_projector(2, 0), &identity(2).unscale(2.0));
        assert!(max_abs(&(out.matrix() - want)) < 1e-14);
        assert!(hermitian_eigenvalues(out.matrix())[0] > -1e-12);
    }

    #[test]
    fn reorder_outputs_permutes_kraus_rows() {
        let n = depolarizing("A", "B1", 0.0).tensor(&depolarizing("D", "B2", 1.0)).unwrap();
        let r = n.reorder_outputs(&["B2", "B1"]).unwrap();
        let rho = DensityOperator::basis(q("A", 2), 1)
            .unwrap()
            .tensor(&DensityOperator::basis(q("D", 2), 0).unwrap())
            .unwrap();
        let a = n.apply(&rho).unwrap().reorder(&["B2", "B1"]).unwrap();
        let b = r.apply(&rho).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-15);
    }
}
