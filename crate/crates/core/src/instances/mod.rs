//! Instance generators: seeded random families and structured encodings.

pub mod random;
pub mod reductions;

pub use random::{
    gen_random_competitive, gen_random_flower, gen_random_multi_agent, gen_random_platforms, gen_random_signed_flower,
    RandomRanges,
};
pub use reductions::{
    three_petal_game, gen_partition_instance, gen_two_agent_partition, PartitionInstance, SetCoverChoice, SetCoverInstance,
    TwoAgentPartition,
};
