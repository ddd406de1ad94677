pub mod ilt;
pub mod ml;
pub mod oracle;
pub mod solve;
pub mod symbol;
pub mod telegraph;
