package fs.test;

import fs.Parser;

public class ParserTest extends FileTestBase {
    private Parser subject;

    protected void setUp() {
        subject = new Parser();
    }

    public void testParse() {
        String path = load("parse.txt");
        assertEquals(path, subject.parse(path));
    }
}
