// Sentence, word, grapheme and akshara segmentation of a short Hindi text.
//
// cargo run --example segment_devanagari

use hindi_aes::textseg::{
    count_aksharas, count_conjuncts, grapheme_count, SegmentedText, Stopwords,
};

pub fn run() -> hindi_aes::Result<String> {
    let text = "प्रधानमंत्री ने विद्यालय का उद्घाटन किया। छात्रों में उत्साह था! @PERSON1 भी वहाँ थे।";
    let stopwords = Stopwords::hindi_default();
    let seg = SegmentedText::segment(text, &stopwords);

    let mut out = format!("{} sentences after filtering\n", seg.sentences.len());
    for (i, sentence) in seg.sentences.iter().enumerate() {
        out += &format!("sentence {i}:\n");
        for w in sentence {
            out += &format!(
                "  {:<14} graphemes {} aksharas {} conjuncts {}\n",
                w.text, w.grapheme_count, w.akshara_count, w.conjunct_count
            );
        }
    }
    // the counters also work on bare words
    let w = "उज्ज्वल";
    out += &format!(
        "{w}: {} graphemes, {} aksharas, {} conjuncts\n",
        grapheme_count(w),
        count_aksharas(w)?,
        count_conjuncts(w)?
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() -> hindi_aes::Result<()> {
    print!("{}", run()?);
    Ok(())
}
