pub mod eval;
pub mod gen_data;
pub mod score;
pub mod train;

use spam_core::UtteranceRecord;
pub use spam_stats::tables::variant_row_id as composite_id;

/// The constructed MOS stand-in for one variant: 5 minus the number of
/// flipped attributes (originals and paraphrases flip nothing).
pub fn mos_standin(
    record: &UtteranceRecord,
    negative_prompt: &str,
) -> Result<f64, spam_datagen::DatagenError> {
    let flips = spam_datagen::flipped_attributes(&record.style_key, negative_prompt)?;
    Ok(5.0 - flips.len() as f64)
}
