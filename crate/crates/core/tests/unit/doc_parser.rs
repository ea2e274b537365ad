use docfuzz_core::bundled;
use docfuzz_core::doc_parser::*;

fn listing(name: &str) -> RawApiDoc {
    bundled::listing_docs()
        .into_iter()
        .find(|d| d.api_path == name)
        .unwrap()
}

#[test]
fn listings_classify() {
    assert_eq!(
        classify_doc(&listing("cv2.getRotationMatrix2D")),
        DocClass::WellDocumented
    );
    assert_eq!(
        classify_doc(&listing("cv2.calcBackProject")),
        DocClass::PoorlyDocumented
    );
    assert_eq!(classify_doc(&listing("cv2.aruco")), DocClass::Undocumented);
}

#[test]
fn undocumented_sentinels() {
    for body in [
        "",
        "   \n\t",
        "No documentation available",
        " No documentation available.\n",
    ] {
        let doc = RawApiDoc {
            api_path: "m.f".into(),
            body: body.into(),
        };
        assert_eq!(classify_doc(&doc), DocClass::Undocumented, "{body:?}");
    }
}

#[test]
fn rotation_signature() {
    let s = parse_signature("getRotationMatrix2D(center, angle, scale) -> retval").unwrap();
    assert_eq!(s.api_name, "getRotationMatrix2D");
    assert_eq!(s.inputs, ["center", "angle", "scale"]);
    assert_eq!(s.outputs, ["retval"]);
    assert!(s.optional_buffer_params.is_empty());
}

#[test]
fn back_project_signature() {
    let s = parse_signature("calcBackProject(images, channels, hist, ranges, scale[, dst]) -> dst").unwrap();
    assert_eq!(s.inputs, ["images", "channels", "hist", "ranges", "scale"]);
    assert_eq!(s.outputs, ["dst"]);
    assert_eq!(s.optional_buffer_params, ["dst"]);
}

#[test]
fn empty_parameter_list() {
    let s = parse_signature("f() -> none").unwrap();
    assert!(s.inputs.is_empty());
    assert_eq!(s.outputs, ["none"]);
}

#[test]
fn nested_optional_groups_flatten() {
    let s = parse_signature("resize(src, dsize[, dst[, fx[, fy]]]) -> dst").unwrap();
    assert_eq!(s.inputs, ["src", "dsize"]);
    assert_eq!(s.optional_buffer_params, ["dst", "fx", "fy"]);
    assert_eq!(s.outputs, ["dst", "fx", "fy"]);
}

#[test]
fn multiple_outputs_after_arrow() {
    let s = parse_signature("threshold(src, thresh, maxval, type[, dst]) -> retval, dst").unwrap();
    assert_eq!(s.outputs, ["retval", "dst"]);
    let s = parse_signature("f(a) ->(x, y)").unwrap();
    assert_eq!(s.outputs, ["x", "y"]);
}

#[test]
fn malformed_signatures() {
    for bad in [
        "f(a, b)",
        "f(a, b -> c",
        "f(a[, b) -> c",
        "f(a], b) -> c",
        "(a) -> b",
        "f(a,, b) -> c",
        "f(a) -> ",
        "f(a) => b",
        "f(1a) -> b",
        "f(a, a) -> b",
        "f(a, b,) -> c",
    ] {
        assert!(
            matches!(parse_signature(bad), Err(ParseError::MalformedSignature { .. })),
            "{bad}"
        );
    }
}

#[test]
fn rotation_descriptions() {
    let d = parse_param_descriptions(&listing("cv2.getRotationMatrix2D").body);
    let pairs: Vec<_> = d.iter().map(|p| (p.name.as_str(), p.text.as_str())).collect();
    assert_eq!(
        pairs,
        [
            ("center", "Center of the rotation in the source image."),
            (
                "angle",
                "Rotation angle in degrees. Positive values mean counter-clockwise rotation."
            ),
            ("scale", "Isotropic scale factor."),
        ]
    );
}

#[test]
fn continuation_lines_fold_and_duplicates_kept() {
    let body = "f(x) -> y\n.   @param x first part\n.   second part\n.   \n.   @param x again\n";
    let d = parse_param_descriptions(body);
    assert_eq!(d.len(), 2);
    assert_eq!(d[0].text, "first part second part");
    assert_eq!(d[1].text, "again");
    assert!(parse_param_descriptions("f(x) -> y\n. @brief nothing").is_empty());
}

#[test]
fn overloads_counted() {
    let doc = RawApiDoc {
        api_path: "cv2.line".into(),
        body: "line(img, pt1, pt2) -> img\nline(img, pt1, pt2, color) -> img\n.   @brief Draws.".into(),
    };
    let p = parse_doc(&doc);
    assert_eq!(p.signature.unwrap().inputs, ["img", "pt1", "pt2"]);
    assert_eq!(p.extra_overloads, 1);
    assert_eq!(p.brief.as_deref(), Some("Draws."));
}

#[test]
fn well_documented_without_signature_reports_error() {
    let doc = RawApiDoc {
        api_path: "m.g".into(),
        body: ".   @param a something".into(),
    };
    let p = parse_doc(&doc);
    assert_eq!(p.class, DocClass::WellDocumented);
    assert!(p.signature.is_none());
    assert!(p.error.is_some());
}
