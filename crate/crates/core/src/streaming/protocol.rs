use serde::{Deserialize, Serialize};

use super::bits::BitState;
use super::randomness::SharedRandomness;
use super::runner::{advance, OnePassAlgorithm};
use crate::{Error, Result};

/// A one-way two-party protocol: party 1 sends one message, party 2 answers.
pub trait Protocol {
    type Input1;
    type Input2;
    type Output;

    /// Party 1's message `f(z₁, R)`; its length may not exceed `budget_bits`.
    fn send(&self, input1: &Self::Input1, budget_bits: usize, rand: &SharedRandomness) -> Result<BitState>;

    /// Party 2's output `o(z₂, message, R)`.
    fn receive(&self, input2: &Self::Input2, message: &BitState, rand: &SharedRandomness) -> Result<Self::Output>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript<O> {
    pub message: BitString,
    pub output: O,
    pub budget_bits: usize,
}

/// Message bits as carried in a transcript (hex payload, MSB first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitString {
    pub len_bits: usize,
    pub hex: String,
}

impl From<&BitState> for BitString {
    fn from(s: &BitState) -> Self {
        BitString {
            len_bits: s.capacity_bits(),
            hex: s.to_hex(),
        }
    }
}

/// Runs both parties against one shared random tape.
pub fn run_protocol<P: Protocol>(
    p: &P,
    input1: &P::Input1,
    input2: &P::Input2,
    budget_bits: usize,
    seed: u64,
) -> Result<ProtocolTranscript<P::Output>> {
    let rand = SharedRandomness::new(seed);
    let message = p.send(input1, budget_bits, &rand)?;
    if message.capacity_bits() > budget_bits {
        return Err(Error::BudgetViolation {
            capacity_bits: budget_bits,
            required_bits: message.capacity_bits(),
        });
    }
    let message = BitState::from_payload(message.capacity_bits(), message.into_payload())?;
    let output = p.receive(input2, &message, &rand)?;
    Ok(ProtocolTranscript {
        message: BitString::from(&message),
        output,
        budget_bits,
    })
}

/// Protocol induced by a one-pass algorithm: party 1 runs the first
/// `split_index` steps and sends the memory configuration; party 2 resumes.
#[derive(Debug, Clone)]
pub struct SimulatedProtocol<A> {
    alg: A,
    split_index: usize,
}

pub fn one_pass_to_protocol<A: OnePassAlgorithm>(alg: A, split_index: usize) -> SimulatedProtocol<A> {
    SimulatedProtocol { alg, split_index }
}

impl<A: OnePassAlgorithm> SimulatedProtocol<A> {
    pub fn split_index(&self) -> usize {
        self.split_index
    }

    /// Splits one stream at the protocol's split index and runs it.
    pub fn run_on_stream(
        &self,
        samples: &[A::Sample],
        budget_bits: usize,
        seed: u64,
    ) -> Result<ProtocolTranscript<A::Output>>
    where
        A::Sample: Clone,
    {
        if self.split_index > samples.len() {
            return Err(Error::InvalidParameter(format!(
                "split index {} beyond stream length {}",
                self.split_index,
                samples.len()
            )));
        }
        let (first, second) = samples.split_at(self.split_index);
        run_protocol(self, &first.to_vec(), &second.to_vec(), budget_bits, seed)
    }
}

impl<A: OnePassAlgorithm> Protocol for SimulatedProtocol<A> {
    type Input1 = Vec<A::Sample>;
    type Input2 = Vec<A::Sample>;
    type Output = A::Output;

    fn send(&self, input1: &Self::Input1, budget_bits: usize, rand: &SharedRandomness) -> Result<BitState> {
        if input1.len() != self.split_index {
            return Err(Error::DimensionMismatch {
                expected: self.split_index,
                found: input1.len(),
            });
        }
        if budget_bits == 0 {
            return Err(Error::InvalidParameter("bit budget must be at least 1".into()));
        }
        advance(&self.alg, input1, 0, BitState::zeroed(budget_bits), rand)
    }

    fn receive(&self, input2: &Self::Input2, message: &BitState, rand: &SharedRandomness) -> Result<Self::Output> {
        let state = advance(&self.alg, input2, self.split_index, message.clone(), rand)?;
        self.alg.clone().finalize(&state, rand)
    }
}
